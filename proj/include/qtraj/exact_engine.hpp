#pragma once

#include "qtraj/distribution.hpp"
#include "qtraj/model.hpp"
#include "qtraj/trajectory.hpp"

#include <cstdint>
#include <limits>

namespace qtraj {

/// Conditional distribution p(z, m, tau) proportional to z^{2m} exp(-z^2 tau) p0(z),
/// updated one detection record event at a time.
///
/// Counts multiply the weights by z^2 and no-count intervals by exp(-z^2 dtau). Both are
/// diagonal, so the state depends only on the totals (m, tau). Weights are renormalized
/// after every operation and entries more than `prune_window` below the largest
/// log-weight are dropped.
class ExactEngine {
public:
    static constexpr double kDefaultPruneWindow = 400.0;

    ExactEngine(AtomNumberDistribution initial, cplx C,
                double prune_window = kDefaultPruneWindow);

    const AtomNumberDistribution& distribution() const { return dist_; }
    std::int64_t count() const { return m_; }
    double tau() const { return tau_; }
    cplx C() const { return C_; }

    /// Photodetection: z -> 0 entries become exactly zero. Throws ContradictionError when
    /// no weight sits at z != 0.
    void apply_count();
    void apply_no_count(double dtau);

    /// Conditional <z^2>.
    double second_moment() const { return second_moment_; }
    /// <a1^dag a1>_c = |C|^2 <z^2>.
    double photon_expectation() const { return std::norm(C_) * second_moment_; }
    /// P_{m+1} = <z^2> dtau, the dimensionless form of 2 kappa <a^dag a>_c dt.
    double jump_probability(double dtau) const { return second_moment_ * dtau; }

    /// Compares P_{m+1} with eps; on a count applies the jump, then the no-count interval.
    /// Throws StepSizeError when P >= 1.
    bool step(double dtau, double eps);

private:
    void renormalize();

    AtomNumberDistribution dist_;
    std::int64_t m_ = 0;
    double tau_ = 0.0;
    cplx C_;
    double prune_window_;
    double second_moment_ = 0.0;
};

/// Closed-form conditional distribution at totals (m, tau) from p0, used to check the
/// incremental updates.
AtomNumberDistribution conditional_distribution(const AtomNumberDistribution& initial,
                                                std::int64_t m, double tau);

TrajectoryRecord run_trajectory(const AtomNumberDistribution& initial, cplx C,
                                const StepControl& control, std::uint64_t seed,
                                double prune_window = ExactEngine::kDefaultPruneWindow);

}  // namespace qtraj
