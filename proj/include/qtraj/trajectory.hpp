#pragma once

#include "qtraj/distribution.hpp"
#include "qtraj/errors.hpp"
#include "qtraj/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qtraj {

struct TrajectoryStep {
    double tau = 0.0;
    std::int64_t m = 0;
    double photon_expectation = 0.0;
    std::optional<std::size_t> snapshot;  // index into TrajectoryRecord::snapshots
};

/// Reduced atomic density matrix over explicit occupation-number configurations.
struct DensityMatrixSnapshot {
    std::vector<std::vector<std::int64_t>> basis;
    Eigen::MatrixXcd rho;
};

struct TrajectoryRecord {
    std::uint64_t seed = 0;
    std::string engine;
    std::vector<TrajectoryStep> steps;
    std::vector<double> jump_times;
    std::vector<AtomNumberDistribution> snapshots;
    std::optional<AtomNumberDistribution> final_distribution;
    std::optional<DensityMatrixSnapshot> final_density;  // full engine, small bases only
    double final_tau = 0.0;
    std::int64_t final_m = 0;

    /// Photocount number at time tau from the jump times (counts at t <= tau).
    std::int64_t count_at(double tau) const;

    /// Columns tau,m,photon_expectation.
    void write_csv(std::ostream& out) const;
};

/// Step schedule shared by every engine.
struct StepControl {
    double tau_max = 0.0;
    double dtau = 1e-3;
    /// Upper bound on the jump probability of one step; larger steps are halved.
    double max_step_probability = 0.1;
    int max_halvings = 60;
    /// Store a distribution snapshot every this many steps (0 = never).
    std::int64_t snapshot_every = 0;
    /// Store a row every this many steps; count steps and the last step are always stored.
    std::int64_t record_every = 1;

    void validate() const;
};

/// Engine surface used by `run_steps`, in dimensionless time.
template <typename E>
concept TrajectoryEngine = requires(E& e, const E& ce, double dtau, double eps) {
    { ce.jump_probability(dtau) } -> std::convertible_to<double>;
    { e.step(dtau, eps) } -> std::convertible_to<bool>;
    { ce.tau() } -> std::convertible_to<double>;
    { ce.count() } -> std::convertible_to<std::int64_t>;
    { ce.photon_expectation() } -> std::convertible_to<double>;
};

template <typename E>
concept SnapshotEngine = TrajectoryEngine<E> && requires(const E& ce) {
    { ce.distribution() } -> std::convertible_to<AtomNumberDistribution>;
};

/// Monte Carlo jump loop: in each interval the jump probability P is compared with a
/// fresh uniform variate; P > eps registers a photocount. The interval starts at
/// control.dtau and is halved while P exceeds control.max_step_probability. One variate
/// is drawn per accepted step, so a fixed seed gives a fixed decision sequence.
template <TrajectoryEngine E>
void run_steps(E& engine, const StepControl& control, UniformStream& rng,
               TrajectoryRecord& record) {
    control.validate();
    std::int64_t step_index = 0;
    const double end = control.tau_max;
    while (true) {
        const double remaining = end - engine.tau();
        if (!(remaining > end * 1e-14)) break;
        double h = std::min(control.dtau, remaining);
        int halvings = 0;
        while (engine.jump_probability(h) > control.max_step_probability) {
            if (++halvings > control.max_halvings)
                throw StepSizeError("run_steps: step probability stays above the bound",
                                    engine.jump_probability(h));
            h *= 0.5;
        }
        const double eps = rng.next();
        const bool counted = engine.step(h, eps);
        ++step_index;
        if (counted) record.jump_times.push_back(engine.tau());

        const bool last = !(end - engine.tau() > end * 1e-14);
        const bool snap = control.snapshot_every > 0 && step_index % control.snapshot_every == 0;
        if (counted || last || snap || step_index % control.record_every == 0) {
            TrajectoryStep row{engine.tau(), engine.count(), engine.photon_expectation(), {}};
            if constexpr (SnapshotEngine<E>) {
                if (snap) {
                    row.snapshot = record.snapshots.size();
                    record.snapshots.push_back(engine.distribution());
                }
            }
            record.steps.push_back(row);
        }
    }
    record.final_tau = engine.tau();
    record.final_m = engine.count();
    if constexpr (SnapshotEngine<E>) record.final_distribution = engine.distribution();
}

}  // namespace qtraj
