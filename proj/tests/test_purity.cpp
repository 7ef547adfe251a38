#include "qtraj/errors.hpp"
#include "qtraj/oracles.hpp"
#include "qtraj/purity.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace qtraj;

namespace {
const double kPi = std::numbers::pi;
}

TEST_CASE("coherent overlap") {
    CHECK(coherent_overlap_factor(1.7, 0.0) == cplx{1.0, 0.0});
    CHECK(coherent_overlap_factor(0.0, 1.1) == cplx{1.0, 0.0});
    // 40-digit value of exp(4 (e^{-1.4 i} - 1))
    const cplx v = coherent_overlap_factor(2.0, 0.7);
    CHECK(v.real() == doctest::Approx(-0.0251792610161782919560).epsilon(1e-13));
    CHECK(v.imag() == doctest::Approx(0.0259362399485538095851).epsilon(1e-13));
    const cplx series = oracle::coherent_overlap_series(2.0, 0.7, 200);
    CHECK(std::abs(series - v) <= 1e-10 * std::abs(v));
    CHECK_THROWS_AS(coherent_overlap_factor(-1.0, 0.0), ValidationError);
}

TEST_CASE("cat density matrix") {
    const Eigen::Matrix2cd pure = cat_density_matrix({0, 4, 1.3, 0.0, 0.0});
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(std::abs(pure(i, j) - 0.5) < 1e-15);

    const Eigen::Matrix2cd mixed = cat_density_matrix({0, 4, 40.0, 1.0, 0.2});
    CHECK(std::abs(mixed(0, 1)) < 1e-300);
    CHECK(mixed(0, 0).real() == 0.5);

    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        const CatState cat{0, 3, 3.0 * u(gen), kPi * u(gen), 2.0 * kPi * u(gen)};
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> eig(cat_density_matrix(cat));
        const double r = std::abs(std::exp(cat.alpha_abs * cat.alpha_abs * (std::polar(1.0, 2.0 * cat.phi) - 1.0)));
        CHECK(eig.eigenvalues()(0) == doctest::Approx(0.5 * (1.0 - r)).epsilon(1e-12));
        CHECK(eig.eigenvalues()(1) == doctest::Approx(0.5 * (1.0 + r)).epsilon(1e-12));
        CHECK(eig.eigenvalues()(0) >= -1e-15);
        CHECK(eig.eigenvalues()(1) <= 1.0 + 1e-15);
    }
}

TEST_CASE("purity") {
    CHECK(purity({0, 1, 2.0, 0.0, 0.0}) == 1.0);
    CHECK(purity({0, 1, 0.25, kPi / 2, 0.0}) == doctest::Approx(0.5 * (1.0 + std::exp(-0.25))).epsilon(1e-15));
    CHECK(std::abs(purity({0, 1, 0.25, kPi / 2, 0.0}) - 0.8894) < 1e-3);

    std::mt19937_64 gen(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        const CatState cat{1, 5, 2.5 * u(gen), kPi * u(gen), 6.0 * u(gen)};
        const Eigen::Matrix2cd rho = cat_density_matrix(cat);
        CHECK(purity(cat) == doctest::Approx((rho * rho).trace().real()).epsilon(1e-12));
        // independent of gamma and of the atom numbers
        CHECK(purity({7, 9, cat.alpha_abs, cat.phi, 0.0}) == purity(cat));
        CHECK(purity(cat) >= 0.5);
        CHECK(purity(cat) <= 1.0);
    }
    double prev = 1.0;
    for (double x = 0.0; x < 2.0; x += 0.05) {
        const double p = purity({0, 1, x, kPi / 2, 0.0});
        CHECK(p <= prev);
        prev = p;
    }
}

TEST_CASE("distinguishability") {
    CHECK(distinguishability_ok({0, 1, 1.0, kPi / 2, 0.0}));
    CHECK_FALSE(distinguishability_ok({0, 1, 1.0, 0.0, 0.0}));
    CHECK_FALSE(distinguishability_ok({0, 1, 0.25, kPi / 2, 0.0}));
    CHECK(distinguishability_ok({0, 1, 0.2501, kPi / 2, 0.0}));
    CHECK(distinguishability_ok({0, 1, 1.0, kPi / 2 + kPi, 0.0}));
}

TEST_CASE("purity_general") {
    Eigen::MatrixXcd proj = Eigen::MatrixXcd::Zero(3, 3);
    proj(1, 1) = 1.0;
    CHECK(purity_general(proj) == doctest::Approx(1.0));
    CHECK(purity_general(Eigen::MatrixXcd::Identity(2, 2) * 0.5) == doctest::Approx(0.5));

    std::mt19937_64 gen(31);
    std::normal_distribution<double> g;
    for (int t = 0; t < 20; ++t) {
        Eigen::MatrixXcd a(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) a(i, j) = cplx{g(gen), g(gen)};
        Eigen::MatrixXcd rho = a * a.adjoint();
        rho /= rho.trace();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho);
        CHECK(purity_general(rho) == doctest::Approx(eig.eigenvalues().squaredNorm()).epsilon(1e-12));
    }
    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(2, 2);
    CHECK_THROWS_AS(purity_general(bad), ValidationError);
    bad = Eigen::MatrixXcd::Identity(2, 2) * 0.5;
    bad(0, 1) = 0.3;
    CHECK_THROWS_AS(purity_general(bad), ValidationError);
}

TEST_CASE("purity sweep includes the threshold row") {
    const auto rows = purity_sweep(2.0, 4, 4);
    CHECK(rows.size() == 5 * 5 + 1);
    bool found = false;
    for (const auto& r : rows) {
        if (std::abs(r.distinguishability - 0.25) < 1e-15) {
            found = true;
            CHECK(r.purity == doctest::Approx(0.8894).epsilon(1e-3));
        }
    }
    CHECK(found);
    std::ostringstream out;
    write_purity_sweep_csv(out, rows);
    CHECK(out.str().rfind("alpha_abs,phi,alpha_sin_phi,purity\n", 0) == 0);
    CHECK(out.str().find("0.25,1.5707963267948966,0.25,0.8894003915357025\n") != std::string::npos);
    CHECK_THROWS_AS(purity_sweep(-1.0, 3, 3), ValidationError);
}
