#include "qtraj/gaussian_engine.hpp"

#include "qtraj/errors.hpp"
#include "qtraj/gaussian_integrals.hpp"
#include "qtraj/special.hpp"

#include <cmath>
#include <string>

namespace qtraj {
namespace {

void require_mode(const GaussianEngineState& s, DiffractionMode mode, const char* who) {
    if (s.mode != mode) throw ValidationError(std::string(who) + ": wrong diffraction mode");
    if (!(s.spec.sigma > 0.0)) throw ValidationError(std::string(who) + ": sigma must be > 0");
    if (s.m < 0 || !(s.tau >= 0.0)) throw ValidationError(std::string(who) + ": invalid (m, tau)");
}

double checked_probability(double p, const char* who) {
    if (p >= 1.0)
        throw StepSizeError(std::string(who) + ": jump probability " + std::to_string(p) +
                                " >= 1, shrink dtau",
                            p);
    return p;
}

}  // namespace

TiltedGaussianParams TiltedGaussianParams::from(const GaussianSpec& spec, double tau) {
    TiltedGaussianParams t;
    t.p = tau + 1.0 / (2.0 * spec.variance());
    t.q = spec.z0 / (2.0 * spec.variance());
    t.a = t.q / t.p;
    t.b = t.q == 0.0 ? 0.0 : t.p / (4.0 * t.q * t.q);
    return t;
}

double maximum_rate_sum_ratio(std::int64_t m, double b) {
    if (m < 0) throw ValidationError("maximum_rate_sum_ratio: m must be >= 0");
    const double dm = static_cast<double>(m);
    // S_j(b) is log_tilted_sum(2j, b)
    return (2.0 * dm + 1.0) * (2.0 * dm + 2.0) *
           std::exp(log_tilted_sum(2 * m + 2, b) - log_tilted_sum(2 * m, b));
}

double minimum_jump_rate(const GaussianEngineState& s, MinimumForm form) {
    require_mode(s, DiffractionMode::minimum, "minimum_jump_rate");
    const double inv_var = 1.0 / s.spec.variance();
    const double offset = form == MinimumForm::derived ? 0.5 * inv_var : inv_var;
    return (static_cast<double>(s.m) + 0.5) / (s.tau + offset);
}

double maximum_jump_rate(const GaussianEngineState& s) {
    require_mode(s, DiffractionMode::maximum, "maximum_jump_rate");
    if (!(s.spec.z0 > 0.0))
        throw ValidationError("maximum-mode closed form needs z0 > 0");
    const auto t = TiltedGaussianParams::from(s.spec, s.tau);
    return t.a * t.a * maximum_rate_sum_ratio(s.m, t.b);
}

double next_count_prob_min(const GaussianEngineState& state, double dtau, MinimumForm form) {
    require_mode(state, DiffractionMode::minimum, "next_count_prob_min");
    if (!(dtau >= 0.0)) throw ValidationError("next_count_prob_min: negative dtau");
    return checked_probability(minimum_jump_rate(state, form) * dtau, "next_count_prob_min");
}

double next_count_prob_max(const GaussianEngineState& state, double dtau) {
    require_mode(state, DiffractionMode::maximum, "next_count_prob_max");
    if (!(dtau >= 0.0)) throw ValidationError("next_count_prob_max: negative dtau");
    return checked_probability(maximum_jump_rate(state) * dtau, "next_count_prob_max");
}

double conditional_moment_analytic(const GaussianEngineState& state, int order) {
    if (order < 0) throw ValidationError("conditional_moment_analytic: negative order");
    if (order == 0) return 1.0;
    require_mode(state, state.mode, "conditional_moment_analytic");
    const auto t = TiltedGaussianParams::from(state.spec, state.tau);
    const std::int64_t base = 2 * state.m;
    if (state.mode == DiffractionMode::minimum) {
        if (order % 2 != 0) return 0.0;
        const std::int64_t half = order / 2;
        return std::exp(log_gauss_even_moment(state.m + half, t.p) -
                        log_gauss_even_moment(state.m, t.p));
    }
    const SignedLog num = reduced_tilted_moment(base + order, t.p, t.q);
    const SignedLog den = reduced_tilted_moment(base, t.p, t.q);
    return num.sign * den.sign * std::exp(num.log_abs - den.log_abs);
}

GaussianEngine::GaussianEngine(GaussianSpec spec, DiffractionMode mode, cplx C, MinimumForm form)
    : state_{spec, 0, 0.0, mode}, C_(C), form_(form) {
    if (!(spec.sigma > 0.0)) throw ValidationError("gaussian engine: sigma must be > 0");
    if (mode == DiffractionMode::maximum && !(spec.z0 > 0.0))
        throw ValidationError("gaussian engine: maximum mode needs z0 > 0");
}

double GaussianEngine::jump_rate() const {
    return state_.mode == DiffractionMode::minimum ? minimum_jump_rate(state_, form_)
                                                   : maximum_jump_rate(state_);
}

double GaussianEngine::photon_expectation() const {
    return std::norm(C_) * jump_rate();
}

void GaussianEngine::apply_no_count(double dtau) {
    if (!(dtau >= 0.0)) throw ValidationError("gaussian engine: negative no-count interval");
    state_.tau += dtau;
}

bool GaussianEngine::step(double dtau, double eps) {
    if (!(dtau >= 0.0)) throw ValidationError("gaussian engine: negative step");
    const double p = checked_probability(jump_probability(dtau), "gaussian engine");
    const bool counted = p > eps;
    if (counted) apply_count();
    apply_no_count(dtau);
    return counted;
}

TrajectoryRecord run_trajectory_analytic(const GaussianSpec& spec, DiffractionMode mode, cplx C,
                                         const StepControl& control, std::uint64_t seed,
                                         MinimumForm form) {
    TrajectoryRecord record;
    record.seed = seed;
    record.engine = "gaussian";
    GaussianEngine engine(spec, mode, C, form);
    UniformStream rng(seed);
    run_steps(engine, control, rng, record);
    return record;
}

}  // namespace qtraj
