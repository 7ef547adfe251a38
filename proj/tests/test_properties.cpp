#include "qtraj/exact_engine.hpp"
#include "qtraj/full_engine.hpp"
#include "qtraj/gaussian_engine.hpp"
#include "qtraj/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

using namespace qtraj;

namespace {

double total_probability(const AtomNumberDistribution& d) {
    const auto p = d.probabilities();
    return std::accumulate(p.begin(), p.end(), 0.0);
}

double total_probability(const ConditionalSuperposition& s) {
    double sum = 0.0;
    for (const auto& c : s.amplitudes()) sum += std::norm(c);
    return sum;
}

}  // namespace

TEST_CASE("random operation sequences keep the exact engine normalized and on the closed form") {
    std::mt19937_64 gen(101);
    std::uniform_int_distribution<int> n_atoms(2, 400);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const bool minimum = trial % 2 == 0;
        const std::int64_t n = n_atoms(gen);
        const auto p0 = minimum ? binomial_minimum(LatticeGeometry::minimum(n, 2))
                                : binomial_maximum(LatticeGeometry::maximum(n, 5, 2));
        ExactEngine e(p0, cplx{0.0, 0.1});
        for (int op = 0; op < 40; ++op) {
            if (u(gen) < 0.5) e.apply_count();
            else e.apply_no_count(std::pow(10.0, -4.0 * u(gen)));
            REQUIRE(std::abs(total_probability(e.distribution()) - 1.0) < 1e-12);
        }
        const auto ref = conditional_distribution(p0, e.count(), e.tau());
        for (std::size_t i = 0; i < e.distribution().size(); ++i) {
            const double r = ref.probability_of(e.distribution().support()[i]);
            // entries far below the pruning window are not compared
            if (r < 1e-150) continue;
            CHECK(e.distribution().probability(i) == doctest::Approx(r).epsilon(1e-9));
        }
    }
}

TEST_CASE("order of counts and no-count intervals does not matter") {
    std::mt19937_64 gen(202);
    std::uniform_real_distribution<double> u(0.0, 0.05);
    const auto p0 = binomial_minimum(LatticeGeometry::minimum(60, 4));
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> ops;  // < 0 is a count
        for (int k = 0; k < 6; ++k) ops.push_back(-1.0);
        for (int k = 0; k < 6; ++k) ops.push_back(u(gen));
        // pruning depends on the order, so the identity is checked without it
        const double no_prune = std::numeric_limits<double>::infinity();
        ExactEngine a(p0, cplx{0.0, 0.1}, no_prune);
        for (double op : ops) op < 0 ? a.apply_count() : a.apply_no_count(op);
        std::shuffle(ops.begin(), ops.end(), gen);
        ExactEngine b(p0, cplx{0.0, 0.1}, no_prune);
        for (double op : ops) op < 0 ? b.apply_count() : b.apply_no_count(op);
        for (std::size_t i = 0; i < a.distribution().size(); ++i) {
            const double pa = a.distribution().probability(i);
            const double pb = b.distribution().probability_of(a.distribution().support()[i]);
            CHECK(std::abs(pa - pb) <= 1e-12 * std::max(pa, 1e-300));
        }
    }
}

TEST_CASE("random operation sequences keep the full engine normalized") {
    CavityParams cav;
    cav.delta_a = -5.0;
    cav.delta_p = 0.3;
    cav.eta = cplx{0.2, 0.1};
    cav.a0 = cplx{0.5, 0.2};
    std::mt19937_64 gen(303);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ConfigurationBasis basis(5, 3);
    const auto amps = superfluid_amplitudes(basis);
    for (int trial = 0; trial < 100; ++trial) {
        const auto modes = trial % 2 == 0 ? ModeFunctions::maximum(3) : ModeFunctions::minimum(3);
        ConditionalSuperposition s(basis, amps, cav, modes, trial % 2 == 0 ? 2 : 3);
        for (int op = 0; op < 30; ++op) {
            if (u(gen) < 0.5) s.apply_jump();
            else s.evolve_no_count(5.0 * u(gen));
            REQUIRE(std::abs(total_probability(s) - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("doublet peaks sit at sqrt(m / (tau + 1/(2 sigma^2)))") {
    // The argmax of z^{2m} e^{-z^2 tau} p0(z) with a Gaussian-like p0 of variance sigma^2.
    // sqrt(m / tau) is its limit once tau >> 1/(2 sigma^2); there both must agree to a step.
    const std::int64_t n = 100;
    const auto p0 = binomial_minimum(LatticeGeometry::minimum(n, 2));
    const double var = static_cast<double>(n);
    std::mt19937_64 gen(404);
    std::uniform_int_distribution<int> ms(1, 200);
    std::uniform_real_distribution<double> lt(-3.0, 1.0);
    int asymptotic = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        const std::int64_t m = ms(gen);
        const double tau = std::pow(10.0, lt(gen));
        const double refined = std::sqrt(m / (tau + 1.0 / (2.0 * var)));
        if (refined > 2.5 * std::sqrt(var)) continue;  // outside the initial bulk
        const auto d = conditional_distribution(p0, m, tau);
        const auto k = d.argmax_positive();
        REQUIRE(k < d.size());
        const double peak = static_cast<double>(d.support()[k]);
        CHECK(std::abs(peak - refined) <= 2.0);
        const double literal = std::sqrt(m / tau);
        if (literal - refined < 1.0) {
            ++asymptotic;
            CHECK(std::abs(peak - literal) <= 2.0);
        }
        // symmetric doublet
        CHECK(d.probability_of(-d.support()[k]) == doctest::Approx(d.probability(k)).epsilon(1e-12));
    }
    CHECK(asymptotic > 100);
}

TEST_CASE("gaussian engine probabilities stay in range along trajectories") {
    StepControl c;
    c.tau_max = 0.02;
    c.dtau = 1e-4;
    for (auto mode : {DiffractionMode::minimum, DiffractionMode::maximum}) {
        const GaussianSpec spec = mode == DiffractionMode::minimum ? GaussianSpec{0.0, 100.0} : GaussianSpec{50.0, 5.0};
        for (int i = 0; i < 20; ++i) {
            const auto rec = run_trajectory_analytic(spec, mode, cplx{0.0, 0.01}, c, trajectory_seed(9, i));
            CHECK(rec.final_tau == doctest::Approx(c.tau_max));
            CHECK(std::is_sorted(rec.jump_times.begin(), rec.jump_times.end()));
            CHECK(static_cast<std::int64_t>(rec.jump_times.size()) == rec.final_m);
        }
    }
}

TEST_CASE("uniform stream stays inside (0, 1)") {
    UniformStream rng(0);
    for (int i = 0; i < 100000; ++i) {
        const double x = rng.next();
        REQUIRE(x > 0.0);
        REQUIRE(x < 1.0);
    }
    CHECK(trajectory_seed(1, 0) != trajectory_seed(1, 1));
    CHECK(trajectory_seed(1, 5) == splitmix64(1 ^ splitmix64(5)));
}
