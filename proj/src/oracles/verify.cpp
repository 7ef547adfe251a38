#include "qtraj/verify.hpp"

#include "qtraj/csv.hpp"
#include "qtraj/distribution.hpp"
#include "qtraj/exact_engine.hpp"
#include "qtraj/full_engine.hpp"
#include "qtraj/gaussian_engine.hpp"
#include "qtraj/gaussian_integrals.hpp"
#include "qtraj/oracles.hpp"
#include "qtraj/purity.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

namespace qtraj {
namespace {

double rel_error(double value, double reference) {
    const double scale = std::abs(reference);
    return scale > 0.0 ? std::abs(value - reference) / scale : std::abs(value);
}

/// Accumulates the worst point of a grid check.
class Worst {
public:
    void add(double closed, double ref, const std::string& where) {
        const double e = rel_error(closed, ref);
        if (!seen_ || e > err_ || std::isnan(e)) {
            seen_ = true;
            err_ = e;
            closed_ = closed;
            ref_ = ref;
            where_ = where;
        }
    }

    VerifyRow row(std::string group, const std::string& name, double tol, bool info = false) const {
        VerifyRow r{std::move(group), name + (where_.empty() ? "" : " [worst " + where_ + "]"),
                    closed_, ref_, err_, tol, CheckStatus::pass};
        if (info) r.status = CheckStatus::info;
        else if (!(err_ <= tol)) r.status = CheckStatus::fail;
        return r;
    }

private:
    bool seen_ = false;
    double err_ = 0.0;
    double closed_ = 0.0;
    double ref_ = 0.0;
    std::string where_;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[128];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

void gaussian_identities(std::vector<VerifyRow>& rows) {
    {
        Worst w;
        for (auto [n, p] : {std::pair{0, 1.0}, {1, 1.0}, {5, 0.3}, {25, 0.37}, {40, 2.5}})
            w.add(gauss_even_moment(n, p), oracle::half_line_moment(2 * n, p), fmt("n=%g p=%g", n, p));
        rows.push_back(w.row("gaussian-moments", "even half-line moment vs quadrature", 1e-10));
    }
    {
        Worst w;
        for (auto [n, p] : {std::pair{0, 1.0}, {1, 2.0}, {7, 0.5}, {20, 0.9}})
            w.add(gauss_odd_moment(n, p), oracle::half_line_moment(2 * n + 1, p), fmt("n=%g p=%g", n, p));
        rows.push_back(w.row("gaussian-moments", "odd half-line moment vs quadrature", 1e-10));
    }
    {
        Worst w;
        struct Case { int n; double p, q; };
        for (auto c : {Case{0, 1.0, 1.0}, Case{1, 1.0, 1.0}, Case{5, 0.5, -0.7}, Case{12, 0.8, 3.1},
                       Case{20, 0.05, 0.4}, Case{6, 2.0, 0.0}}) {
            const SignedLog closed = log_tilted_gauss_moment(c.n, c.p, c.q);
            const SignedLog ref = oracle::full_line_tilted(c.n, c.p, c.q);
            w.add(closed.value(), ref.value(), fmt("n=%g p=%g q=%g", c.n, c.p, c.q));
        }
        rows.push_back(w.row("gaussian-moments", "tilted full-line moment vs quadrature", 1e-9));
    }
}

void minimum_rate_checks(std::vector<VerifyRow>& rows, bool inject_printed) {
    for (double n_atoms : {1e2, 1e4}) {
        const double sigma = std::sqrt(n_atoms);
        for (double ts : {0.0, 0.1, 1.0, 10.0}) {
            const double tau = ts / (sigma * sigma);
            Worst derived;
            Worst printed;
            for (int m = 0; m <= 20; ++m) {
                const GaussianEngineState s{{0.0, sigma}, m, tau, DiffractionMode::minimum};
                const double ref = oracle::minimum_rate_ratio(m, tau, sigma);
                const auto where = fmt("m=%g", m);
                derived.add(minimum_jump_rate(s, inject_printed ? MinimumForm::printed
                                                                : MinimumForm::derived),
                            ref, where);
                printed.add(minimum_jump_rate(s, MinimumForm::printed), ref, where);
            }
            const auto slice = fmt("N=%g tau*sigma^2=%g", n_atoms, ts);
            rows.push_back(derived.row("minimum-rate", "(m+1/2)/(tau+1/(2 sigma^2)) vs quadrature, " + slice,
                                       1e-8));
            if (!inject_printed)
                rows.push_back(printed.row("minimum-rate",
                                           "printed (m+1/2)/(tau+1/sigma^2) vs quadrature, " + slice,
                                           1e-8, true));
        }
    }
}

void maximum_rate_checks(std::vector<VerifyRow>& rows) {
    const double n_atoms = 1e4;
    for (double f : {0.1, 0.5, 0.9}) {
        const GaussianSpec spec{n_atoms * f, std::sqrt(n_atoms * f * (1.0 - f))};
        for (double ts : {0.0, 0.1, 1.0, 10.0}) {
            const double tau = ts / spec.variance();
            Worst w;
            Worst half;
            for (int m = 0; m <= 20; ++m) {
                const GaussianEngineState s{spec, m, tau, DiffractionMode::maximum};
                const double closed = maximum_jump_rate(s);
                w.add(closed, oracle::maximum_rate_ratio(m, tau, spec.z0, spec.sigma), fmt("m=%g", m));
                if (m % 10 == 0)
                    half.add(closed, oracle::maximum_rate_ratio(m, tau, spec.z0, spec.sigma, true),
                             fmt("m=%g", m));
            }
            const auto slice = fmt("K/M=%g tau*sigma^2=%g", f, ts);
            rows.push_back(w.row("maximum-rate", "closed-form sums vs full-line quadrature, " + slice, 1e-8));
            rows.push_back(half.row("maximum-rate", "closed form vs half-line quadrature, " + slice, 1e-8,
                                    true));
        }
    }
    for (double b : {0.01, 0.37, 2.5, 30.0}) {
        Worst w;
        for (int m = 0; m <= 10; ++m)
            w.add(maximum_rate_sum_ratio(m, b), oracle::rational_rate_sum_ratio(m, b), fmt("m=%g", m));
        rows.push_back(w.row("maximum-rate", fmt("log-domain sums vs rational arithmetic, b=%g", b), 1e-12));
    }
}

void conditional_moment_checks(std::vector<VerifyRow>& rows) {
    Worst w;
    for (auto mode : {DiffractionMode::minimum, DiffractionMode::maximum}) {
        const GaussianSpec spec = mode == DiffractionMode::minimum ? GaussianSpec{0.0, 10.0}
                                                                   : GaussianSpec{300.0, 15.0};
        for (int m : {0, 3, 12}) {
            for (double ts : {0.0, 1.0, 10.0}) {
                const double tau = ts / spec.variance();
                for (int order : {1, 2, 3, 4}) {
                    const GaussianEngineState s{spec, m, tau, mode};
                    const double closed = conditional_moment_analytic(s, order);
                    if (mode == DiffractionMode::minimum && order % 2 == 1) {
                        // symmetric density: odd moments vanish exactly
                        w.add(1.0 + std::abs(closed), 1.0, "odd moment");
                    } else {
                        const double ref = oracle::conditional_moment(m, tau, spec.z0, spec.sigma, order);
                        w.add(closed, ref, std::string(to_string(mode)) + fmt(" m=%g ts=%g k=%g", m, ts, order));
                    }
                }
            }
        }
    }
    rows.push_back(w.row("conditional-moments", "analytic <z^k> vs quadrature", 1e-8));
}

void discrete_vs_continuum(std::vector<VerifyRow>& rows) {
    const LatticeGeometry geoms[] = {LatticeGeometry::minimum(10000, 2),
                                     LatticeGeometry::maximum(10000, 2, 1),
                                     LatticeGeometry::maximum(10000, 10, 1)};
    Worst w;
    for (const auto& g : geoms) {
        const auto mode = g.illuminated == g.sites ? DiffractionMode::minimum : DiffractionMode::maximum;
        const GaussianSpec spec = gaussian_of(mode, g);
        const auto initial = discretized_gaussian(mode, g, spec);
        for (auto [m, ts] : {std::pair{0, 0.0}, {5, 1.0}, {20, 10.0}, {100, 100.0}}) {
            const double tau = ts / spec.variance();
            const double exact = moment(conditional_distribution(initial, m, tau), 2);
            const GaussianEngineState s{spec, m, tau, mode};
            const double closed = mode == DiffractionMode::minimum ? minimum_jump_rate(s) : maximum_jump_rate(s);
            w.add(closed, exact, std::string(to_string(mode)) + fmt(" K/M=%g m=%g ts=%g", g.illuminated_fraction(), m, ts));
        }
    }
    rows.push_back(w.row("engines", "closed-form rate vs discrete <z^2>, N=1e4", 1e-3));
}

void full_vs_exact(std::vector<VerifyRow>& rows) {
    CavityParams cav;
    cav.g0 = 1.0;
    cav.g1 = 1.0;
    cav.delta_a = -10.0;
    cav.a0 = 1.0;
    cav.eta = 0.0;
    cav.dispersive_shift = false;
    const auto scales = ScatteringScales::from(cav);
    const auto geom = LatticeGeometry::maximum(4, 2, 1);
    const auto modes = ModeFunctions::maximum(2);
    ConfigurationBasis basis(4, 2);
    auto amps = superfluid_amplitudes(basis);
    ConditionalSuperposition full(std::move(basis), std::move(amps), cav, modes, 1);
    ExactEngine exact(binomial_maximum(geom), scales.C);
    const std::vector<double> schedule = {0.3, -1, 0.1, -1, -1, 1.0, -1, 0.5};  // -1 = count
    for (double ev : schedule) {
        if (ev < 0) {
            full.apply_jump();
            exact.apply_count();
        } else {
            full.evolve_no_count(ev / scales.tau_rate);
            exact.apply_no_count(ev);
        }
    }
    const auto marginal = full.reduce_to_z(DiffractionMode::maximum);
    Worst w;
    for (std::size_t i = 0; i < marginal.size(); ++i) {
        const auto z = marginal.support()[i];
        w.add(marginal.probability(i), exact.distribution().probability_of(z), fmt("z=%g", static_cast<double>(z)));
    }
    rows.push_back(w.row("engines", "full-configuration z-marginal vs exact engine (M=2, N=4)", 1e-12));
}

void cavity_checks(std::vector<VerifyRow>& rows) {
    CavityParams cav;
    cav.g0 = 1.3;
    cav.g1 = 0.7;
    cav.delta_a = -4.0;
    cav.delta_p = 0.8;
    cav.kappa = 1.0;
    cav.eta = 0.0;
    cav.a0 = cplx{0.4, -0.9};
    cav.dispersive_shift = false;
    const cplx c = derive_C(cav);
    const cplx ss = oracle::cavity_steady_state(cav, 1.0, 0.0);
    Worst w;
    w.add(c.real(), ss.real(), "Re");
    w.add(c.imag(), ss.imag(), "Im");
    rows.push_back(w.row("model", "C vs steady state of the cavity amplitude equation", 1e-9));
}

void purity_checks(std::vector<VerifyRow>& rows) {
    {
        Worst w;
        for (double a : {0.0, 0.5, 1.0, 2.0, 3.0}) {
            for (int k = 0; k < 12; ++k) {
                const double phi = std::numbers::pi * k / 12.0;
                const cplx closed = coherent_overlap_factor(a, phi);
                const cplx series = oracle::coherent_overlap_series(a, phi, 200);
                const double err = std::abs(closed - series) / std::abs(closed);
                w.add(1.0 + err, 1.0, fmt("|alpha|=%g phi=%g", a, phi));
            }
        }
        auto row = w.row("purity", "coherent overlap closed form vs Fock series (n<=200)", 1e-10);
        row.closed_form = row.rel_error;
        row.oracle = 0.0;
        rows.push_back(row);
    }
    {
        const CatState cat{3, 7, 0.25, std::numbers::pi / 2.0, 0.0};
        Worst w;
        w.add(purity(cat), 0.8894, "|alpha| sin phi = 1/4");
        auto row = w.row("purity", "purity at the distinguishability threshold vs 0.8894", 1e-3);
        row.rel_error = std::abs(purity(cat) - 0.8894);
        rows.push_back(row);
    }
    {
        Worst w;
        for (double a : {0.1, 0.7, 1.9}) {
            for (double phi : {0.2, 1.1, 2.5}) {
                const CatState cat{0, 5, a, phi, 0.3};
                const auto rho = cat_density_matrix(cat);
                w.add(purity(cat), (rho * rho).trace().real(), fmt("|alpha|=%g phi=%g", a, phi));
            }
        }
        rows.push_back(w.row("purity", "closed-form purity vs Tr(rho^2)", 1e-12));
    }
}

const char* status_name(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "FAIL";
        case CheckStatus::info: return "info";
    }
    return "?";
}

}  // namespace

bool VerifyReport::all_pass() const {
    for (const auto& r : rows)
        if (r.status == CheckStatus::fail) return false;
    return true;
}

nlohmann::ordered_json VerifyReport::to_json() const {
    nlohmann::ordered_json out;
    out["all_pass"] = all_pass();
    auto list = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        list.push_back({{"group", r.group},
                        {"identity", r.name},
                        {"closed_form", r.closed_form},
                        {"oracle", r.oracle},
                        {"relative_error", r.rel_error},
                        {"tolerance", r.tolerance},
                        {"status", status_name(r.status)}});
    }
    out["checks"] = list;
    return out;
}

void VerifyReport::print_table(std::ostream& out) const {
    for (const auto& r : rows) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%-4s  %-20s rel=%-10.3e tol=%-8.1e ", status_name(r.status),
                      r.group.c_str(), r.rel_error, r.tolerance);
        out << buf << r.name << "  closed=" << format_double(r.closed_form)
            << " oracle=" << format_double(r.oracle) << '\n';
    }
    out << (all_pass() ? "all identities pass\n" : "verification FAILED\n");
}

VerifyReport run_verification(const VerifyOptions& options) {
    VerifyReport report;
    gaussian_identities(report.rows);
    minimum_rate_checks(report.rows, options.inject_printed_minimum);
    maximum_rate_checks(report.rows);
    conditional_moment_checks(report.rows);
    discrete_vs_continuum(report.rows);
    full_vs_exact(report.rows);
    cavity_checks(report.rows);
    purity_checks(report.rows);
    return report;
}

}  // namespace qtraj
