#pragma once

#include "qtraj/distribution.hpp"
#include "qtraj/gaussian_engine.hpp"
#include "qtraj/model.hpp"
#include "qtraj/trajectory.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace qtraj {

enum class EngineKind { exact, gaussian, full };
/// Initial distribution fed to the exact engine: the superfluid binomial or the Gaussian
/// limit sampled on the same support.
enum class InitialState { superfluid, gaussian };

const char* to_string(EngineKind kind);
EngineKind parse_engine(const std::string& text);
const char* to_string(InitialState init);
InitialState parse_initial_state(const std::string& text);

struct RunConfig {
    DiffractionMode mode = DiffractionMode::minimum;
    EngineKind engine = EngineKind::exact;
    InitialState initial_state = InitialState::superfluid;
    LatticeGeometry geometry = LatticeGeometry::minimum(100, 2);
    CavityParams cavity;
    StepControl control{.tau_max = 1.0, .dtau = 1e-3};
    std::uint64_t master_seed = 1;
    std::int64_t trajectories = 1;
    std::int64_t workers = 1;
    std::filesystem::path output_dir = "qtraj-out";
    double prune_window = 400.0;
    std::int64_t gaussian_min_atoms = 50;
    std::int64_t basis_cap = 100000;
    MinimumForm minimum_form = MinimumForm::derived;

    /// Throws ValidationError naming the violated constraint, including engine
    /// applicability (gaussian needs K < M in maximum mode, full needs a small basis and
    /// a nonzero tau clock).
    void validate() const;
};

/// Runs trajectory `index` with seed trajectory_seed(master_seed, index).
TrajectoryRecord run_single(const RunConfig& config, std::int64_t index);

/// Runs every trajectory on `config.workers` threads. Records come back in index order
/// and do not depend on the worker count.
std::vector<TrajectoryRecord> run_ensemble(const RunConfig& config);

/// Initial conditional <z^2>; |C|^2 times this is the initial photon number.
double initial_second_moment(const RunConfig& config);

/// Writes per-trajectory CSV/JSON files, snapshot CSVs, jump_counts.csv and
/// manifest.json (with SHA-256 of every file). Returns the written file names.
std::vector<std::string> write_run(const RunConfig& config,
                                   std::span<const TrajectoryRecord> records);

/// Reads back what `write_run` wrote (jump times, final state, snapshots; no step rows).
std::vector<TrajectoryRecord> load_run(const std::filesystem::path& dir);

struct PeakSample {
    std::size_t trajectory = 0;
    double tau = 0.0;
    std::int64_t m = 0;
    std::int64_t peak_z = 0;
    double predicted = 0.0;  // sqrt(m / tau)
    std::int64_t support_step = 1;
};

struct EnsembleStats {
    std::vector<double> tau_grid;
    std::vector<double> mean_m;
    std::vector<double> var_m;
    std::vector<PeakSample> peaks;
    double total_tau = 0.0;
    std::int64_t total_counts = 0;

    /// Counts per unit tau pooled over the ensemble.
    double mean_rate() const { return total_tau > 0.0 ? total_counts / total_tau : 0.0; }
};

/// Mean and variance of m(tau) on `grid_points` evenly spaced times in [0, tau_end] and
/// the positive-z peak of every stored snapshot. Throws on an empty set.
EnsembleStats ensemble_stats(std::span<const TrajectoryRecord> records,
                             std::size_t grid_points = 101);

void write_stats(const std::filesystem::path& dir, const EnsembleStats& stats);

/// Hex SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace qtraj
