#pragma once

#include "qtraj/distribution.hpp"
#include "qtraj/model.hpp"
#include "qtraj/trajectory.hpp"

#include <cstdint>

namespace qtraj {

/// Denominator used for the minimum-mode jump probability.
///  - derived: (m + 1/2) / (tau + 1/(2 sigma^2)), the ratio of the Gaussian moment
///    integrals; this is the default and the form the quadrature oracle confirms.
///  - printed: (m + 1/2) / (tau + 1/sigma^2), kept only to demonstrate the mismatch.
enum class MinimumForm { derived, printed };

struct GaussianEngineState {
    GaussianSpec spec;
    std::int64_t m = 0;
    double tau = 0.0;
    DiffractionMode mode = DiffractionMode::minimum;
};

/// Quadratic and linear exponents of the conditional Gaussian in maximum mode,
/// exp(-p z^2 + 2 q z), with a = q/p and b = p / (4 q^2) = p sigma^4 / z0^2.
struct TiltedGaussianParams {
    double p = 0.0;
    double q = 0.0;
    double a = 0.0;
    double b = 0.0;

    static TiltedGaussianParams from(const GaussianSpec& spec, double tau);
};

/// Jump probability per unit tau, (m + 1/2)/(tau + 1/(2 sigma^2)) for the derived form.
double minimum_jump_rate(const GaussianEngineState& state,
                         MinimumForm form = MinimumForm::derived);
/// Jump probability per unit tau, (2m+1)(2m+2) a^2 S_{m+1}(b) / S_m(b).
double maximum_jump_rate(const GaussianEngineState& state);

/// Closed form P_{m+1} = (m + 1/2)/(tau + 1/(2 sigma^2)) dtau. Throws StepSizeError if >= 1.
double next_count_prob_min(const GaussianEngineState& state, double dtau,
                           MinimumForm form = MinimumForm::derived);

/// Closed form P_{m+1} = (2m+1)(2m+2) a^2 S_{m+1}(b) / S_m(b) dtau with
/// S_j(b) = sum_{k=0}^{j} b^k / ((2j-2k)! k!). Throws StepSizeError if >= 1.
double next_count_prob_max(const GaussianEngineState& state, double dtau);

/// (2m+1)(2m+2) S_{m+1}(b) / S_m(b), the a-independent part of the maximum-mode rate.
double maximum_rate_sum_ratio(std::int64_t m, double b);

/// Conditional <z^order> implied by (spec, m, tau).
double conditional_moment_analytic(const GaussianEngineState& state, int order);

/// Parametric engine: the conditional distribution is never materialized.
class GaussianEngine {
public:
    GaussianEngine(GaussianSpec spec, DiffractionMode mode, cplx C,
                   MinimumForm form = MinimumForm::derived);

    const GaussianEngineState& state() const { return state_; }
    std::int64_t count() const { return state_.m; }
    double tau() const { return state_.tau; }

    /// Rate per unit tau, i.e. P_{m+1} / dtau.
    double jump_rate() const;
    double jump_probability(double dtau) const { return jump_rate() * dtau; }
    double photon_expectation() const;

    void apply_count() { ++state_.m; }
    void apply_no_count(double dtau);
    bool step(double dtau, double eps);

private:
    GaussianEngineState state_;
    cplx C_;
    MinimumForm form_;
};

TrajectoryRecord run_trajectory_analytic(const GaussianSpec& spec, DiffractionMode mode, cplx C,
                                         const StepControl& control, std::uint64_t seed,
                                         MinimumForm form = MinimumForm::derived);

}  // namespace qtraj
