#include "qtraj/ensemble.hpp"

#include "qtraj/config.hpp"
#include "qtraj/csv.hpp"
#include "qtraj/errors.hpp"
#include "qtraj/exact_engine.hpp"
#include "qtraj/full_engine.hpp"
#include "qtraj/rng.hpp"

#include <openssl/evp.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#ifndef QTRAJ_VERSION
#define QTRAJ_VERSION "unknown"
#endif

namespace qtraj {
namespace fs = std::filesystem;

const char* to_string(EngineKind kind) {
    switch (kind) {
        case EngineKind::exact: return "exact";
        case EngineKind::gaussian: return "gaussian";
        case EngineKind::full: return "full";
    }
    return "?";
}

EngineKind parse_engine(const std::string& text) {
    if (text == "exact") return EngineKind::exact;
    if (text == "gaussian") return EngineKind::gaussian;
    if (text == "full") return EngineKind::full;
    throw ValidationError("unknown engine '" + text + "' (expected exact|gaussian|full)");
}

const char* to_string(InitialState init) {
    return init == InitialState::superfluid ? "superfluid" : "gaussian";
}

InitialState parse_initial_state(const std::string& text) {
    if (text == "superfluid") return InitialState::superfluid;
    if (text == "gaussian") return InitialState::gaussian;
    throw ValidationError("unknown initial_state '" + text + "' (expected superfluid|gaussian)");
}

void RunConfig::validate() const {
    geometry.validate(mode);
    cavity.validate();
    control.validate();
    if (trajectories < 0) throw ValidationError("run: trajectories must be >= 0");
    if (workers < 1) throw ValidationError("run: workers must be >= 1");
    if (!(prune_window > 0.0)) throw ValidationError("run: prune_window must be > 0");
    switch (engine) {
        case EngineKind::exact:
            if (initial_state == InitialState::gaussian) gaussian_of(mode, geometry, gaussian_min_atoms);
            break;
        case EngineKind::gaussian:
            if (mode == DiffractionMode::maximum && geometry.illuminated == geometry.sites)
                throw ValidationError("engine gaussian: maximum mode requires K < M");
            gaussian_of(mode, geometry, gaussian_min_atoms);
            break;
        case EngineKind::full: {
            const auto n = ConfigurationBasis::count(geometry.atoms, geometry.sites);
            if (n > basis_cap)
                throw ValidationError("engine full: " + std::to_string(n) +
                                      " configurations exceed basis_cap " + std::to_string(basis_cap));
            if (!(ScatteringScales::from(cavity).tau_rate > 0.0))
                throw ValidationError("engine full: tau clock needs C != 0 (a0 and U10 nonzero)");
            break;
        }
    }
}

namespace {

/// Immutable per-run data shared by all workers.
struct Plan {
    const RunConfig& config;
    ScatteringScales scales;
    std::optional<AtomNumberDistribution> initial;
    std::optional<GaussianSpec> spec;
    std::optional<ConditionalSuperposition> full_state;
    ModeFunctions modes;

    explicit Plan(const RunConfig& cfg) : config(cfg), scales(ScatteringScales::from(cfg.cavity)) {
        cfg.validate();
        switch (cfg.engine) {
            case EngineKind::exact:
                if (cfg.initial_state == InitialState::superfluid) {
                    initial = superfluid_distribution(cfg.mode, cfg.geometry);
                } else {
                    spec = gaussian_of(cfg.mode, cfg.geometry, cfg.gaussian_min_atoms);
                    initial = discretized_gaussian(cfg.mode, cfg.geometry, *spec);
                }
                break;
            case EngineKind::gaussian:
                spec = gaussian_of(cfg.mode, cfg.geometry, cfg.gaussian_min_atoms);
                break;
            case EngineKind::full: {
                modes = cfg.mode == DiffractionMode::minimum
                            ? ModeFunctions::minimum(cfg.geometry.sites)
                            : ModeFunctions::maximum(cfg.geometry.sites);
                ConfigurationBasis basis(cfg.geometry.atoms, cfg.geometry.sites, cfg.basis_cap);
                auto amps = superfluid_amplitudes(basis);
                full_state.emplace(std::move(basis), std::move(amps), cfg.cavity, modes,
                                   cfg.geometry.illuminated);
                break;
            }
        }
    }

    TrajectoryRecord run(std::int64_t index) const {
        const std::uint64_t seed = trajectory_seed(config.master_seed, static_cast<std::uint64_t>(index));
        switch (config.engine) {
            case EngineKind::exact:
                return run_trajectory(*initial, scales.C, config.control, seed, config.prune_window);
            case EngineKind::gaussian:
                return run_trajectory_analytic(*spec, config.mode, scales.C, config.control, seed,
                                               config.minimum_form);
            case EngineKind::full: {
                TrajectoryRecord record;
                record.seed = seed;
                record.engine = "full";
                FullEngine engine(*full_state, config.cavity.kappa, scales.tau_rate, config.mode);
                UniformStream rng(seed);
                run_steps(engine, config.control, rng, record);
                const auto& state = engine.state();
                if (state.basis().size() <= kDensityMatrixMaxBasis)
                    record.final_density = DensityMatrixSnapshot{state.basis().configs(),
                                                                 state.atomic_density_matrix()};
                return record;
            }
        }
        throw ValidationError("unknown engine");
    }
};

std::string indexed_name(const std::string& stem, std::int64_t index, const std::string& ext) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "_%05lld", static_cast<long long>(index));
    return stem + buf + ext;
}

nlohmann::ordered_json density_matrix_json(const DensityMatrixSnapshot& d) {
    nlohmann::ordered_json j;
    j["basis"] = d.basis;
    auto re = nlohmann::ordered_json::array();
    auto im = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < d.rho.rows(); ++r) {
        std::vector<double> row_re;
        std::vector<double> row_im;
        for (Eigen::Index c = 0; c < d.rho.cols(); ++c) {
            row_re.push_back(d.rho(r, c).real());
            row_im.push_back(d.rho(r, c).imag());
        }
        re.push_back(row_re);
        im.push_back(row_im);
    }
    j["real"] = re;
    j["imag"] = im;
    return j;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << text;
}

AtomNumberDistribution read_distribution_csv(const fs::path& path, DiffractionMode mode) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read " + path.string());
    std::string line;
    std::getline(in, line);
    std::vector<std::int64_t> z;
    std::vector<double> logw;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        z.push_back(std::stoll(line.substr(0, comma)));
        const double p = parse_double(line.substr(comma + 1));
        logw.push_back(p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity());
    }
    return AtomNumberDistribution(mode, std::move(z), std::move(logw));
}

}  // namespace

TrajectoryRecord run_single(const RunConfig& config, std::int64_t index) {
    return Plan(config).run(index);
}

std::vector<TrajectoryRecord> run_ensemble(const RunConfig& config) {
    const Plan plan(config);
    std::vector<TrajectoryRecord> records(static_cast<std::size_t>(config.trajectories));
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (true) {
            const std::int64_t i = next.fetch_add(1);
            if (i >= config.trajectories) return;
            try {
                records[static_cast<std::size_t>(i)] = plan.run(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(config.trajectories);
            }
        }
    };
    const auto n_workers = std::min<std::int64_t>(config.workers, std::max<std::int64_t>(1, config.trajectories));
    {
        std::vector<std::jthread> pool;
        for (std::int64_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
        worker();
    }
    if (failure) std::rethrow_exception(failure);
    return records;
}

double initial_second_moment(const RunConfig& config) {
    const Plan plan(config);
    switch (config.engine) {
        case EngineKind::exact: return moment(*plan.initial, 2);
        case EngineKind::gaussian: {
            GaussianEngineState s{*plan.spec, 0, 0.0, config.mode};
            return conditional_moment_analytic(s, 2);
        }
        case EngineKind::full:
            return moment(plan.full_state->reduce_to_z(config.mode), 2);
    }
    return 0.0;
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string data = buf.str();
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::vector<std::string> write_run(const RunConfig& config,
                                   std::span<const TrajectoryRecord> records) {
    const fs::path dir = config.output_dir;
    fs::create_directories(dir);
    std::vector<std::string> files;

    std::ostringstream counts;
    counts << "trajectory,seed,final_m,final_tau\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        const auto idx = static_cast<std::int64_t>(i);
        const std::string csv_name = indexed_name("traj", idx, ".csv");
        std::ostringstream csv;
        rec.write_csv(csv);
        write_text(dir / csv_name, csv.str());
        files.push_back(csv_name);

        nlohmann::ordered_json header;
        header["trajectory"] = idx;
        header["seed"] = rec.seed;
        header["engine"] = rec.engine;
        header["mode"] = to_string(config.mode);
        header["final_m"] = rec.final_m;
        header["final_tau"] = rec.final_tau;
        header["jump_times"] = rec.jump_times;
        auto snaps = nlohmann::ordered_json::array();
        for (const auto& step : rec.steps) {
            if (!step.snapshot) continue;
            const std::string snap_name =
                indexed_name(indexed_name("traj", idx, "") + "_snap", static_cast<std::int64_t>(*step.snapshot), ".csv");
            std::ostringstream snap;
            rec.snapshots[*step.snapshot].write_csv(snap);
            write_text(dir / snap_name, snap.str());
            files.push_back(snap_name);
            snaps.push_back({{"tau", step.tau}, {"m", step.m}, {"file", snap_name}});
        }
        header["snapshots"] = snaps;
        if (rec.final_density) {
            const std::string rho_name = indexed_name("traj", idx, "_rho.json");
            write_text(dir / rho_name, density_matrix_json(*rec.final_density).dump(2) + "\n");
            files.push_back(rho_name);
            header["density_matrix"] = rho_name;
        }
        const std::string json_name = indexed_name("traj", idx, ".json");
        write_text(dir / json_name, header.dump(2) + "\n");
        files.push_back(json_name);

        counts << idx << ',' << rec.seed << ',' << rec.final_m << ',' << format_double(rec.final_tau)
               << '\n';
    }
    if (!records.empty()) {
        write_text(dir / "jump_counts.csv", counts.str());
        files.push_back("jump_counts.csv");
    }

    nlohmann::ordered_json manifest;
    manifest["tool"] = "qtraj";
    manifest["version"] = QTRAJ_VERSION;
    manifest["engine"] = to_string(config.engine);
    manifest["seed_rule"] = "splitmix64(master_seed ^ splitmix64(index)) -> std::mt19937_64";
    manifest["parameters"] = config_to_json(config);
    auto listing = nlohmann::ordered_json::array();
    for (const auto& f : files) listing.push_back({{"file", f}, {"sha256", sha256_file(dir / f)}});
    manifest["files"] = listing;
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    files.push_back("manifest.json");
    return files;
}

std::vector<TrajectoryRecord> load_run(const fs::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw ValidationError("no manifest.json in " + dir.string());
    const auto manifest = nlohmann::json::parse(in);
    const auto mode = parse_mode(manifest["parameters"]["mode"].get<std::string>());
    std::vector<TrajectoryRecord> records;
    for (const auto& entry : manifest["files"]) {
        const auto name = entry["file"].get<std::string>();
        if (!name.starts_with("traj_") || !name.ends_with(".json") || name.ends_with("_rho.json")) continue;
        std::ifstream hin(dir / name);
        const auto h = nlohmann::json::parse(hin);
        TrajectoryRecord rec;
        rec.seed = h["seed"].get<std::uint64_t>();
        rec.engine = h["engine"].get<std::string>();
        rec.final_m = h["final_m"].get<std::int64_t>();
        rec.final_tau = h["final_tau"].get<double>();
        rec.jump_times = h["jump_times"].get<std::vector<double>>();
        for (const auto& s : h["snapshots"]) {
            rec.steps.push_back({s["tau"].get<double>(), s["m"].get<std::int64_t>(), 0.0,
                                 rec.snapshots.size()});
            rec.snapshots.push_back(read_distribution_csv(dir / s["file"].get<std::string>(), mode));
        }
        if (h.contains("density_matrix")) {
            std::ifstream rin(dir / h["density_matrix"].get<std::string>());
            const auto r = nlohmann::json::parse(rin);
            DensityMatrixSnapshot d;
            d.basis = r["basis"].get<std::vector<std::vector<std::int64_t>>>();
            const auto re = r["real"].get<std::vector<std::vector<double>>>();
            const auto im = r["imag"].get<std::vector<std::vector<double>>>();
            const auto n = static_cast<Eigen::Index>(re.size());
            d.rho.resize(n, n);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index k = 0; k < n; ++k)
                    d.rho(i, k) = cplx{re[i][k], im[i][k]};
            rec.final_density = std::move(d);
        }
        records.push_back(std::move(rec));
    }
    return records;
}

EnsembleStats ensemble_stats(std::span<const TrajectoryRecord> records, std::size_t grid_points) {
    if (records.empty()) throw ValidationError("ensemble_stats: no trajectories");
    EnsembleStats stats;
    double tau_end = records.front().final_tau;
    for (const auto& r : records) {
        tau_end = std::min(tau_end, r.final_tau);
        stats.total_tau += r.final_tau;
        stats.total_counts += r.final_m;
    }
    if (tau_end > 0.0 && grid_points >= 2) {
        const double n = static_cast<double>(records.size());
        for (std::size_t g = 0; g < grid_points; ++g) {
            const double tau = tau_end * static_cast<double>(g) / static_cast<double>(grid_points - 1);
            double sum = 0.0;
            double sum2 = 0.0;
            for (const auto& r : records) {
                const double m = static_cast<double>(r.count_at(tau));
                sum += m;
                sum2 += m * m;
            }
            const double mean = sum / n;
            stats.tau_grid.push_back(tau);
            stats.mean_m.push_back(mean);
            stats.var_m.push_back(n > 1 ? (sum2 - n * mean * mean) / (n - 1) : 0.0);
        }
    }
    for (std::size_t t = 0; t < records.size(); ++t) {
        const auto& r = records[t];
        for (const auto& step : r.steps) {
            if (!step.snapshot || step.m < 1 || !(step.tau > 0.0)) continue;
            const auto& dist = r.snapshots[*step.snapshot];
            const std::size_t k = dist.argmax_positive();
            if (k == dist.size()) continue;
            PeakSample s;
            s.trajectory = t;
            s.tau = step.tau;
            s.m = step.m;
            s.peak_z = dist.support()[k];
            s.predicted = std::sqrt(static_cast<double>(step.m) / step.tau);
            s.support_step = dist.mode() == DiffractionMode::minimum ? 2 : 1;
            stats.peaks.push_back(s);
        }
    }
    return stats;
}

void write_stats(const fs::path& dir, const EnsembleStats& stats) {
    fs::create_directories(dir);
    std::ostringstream grid;
    grid << "tau,mean_m,var_m\n";
    for (std::size_t i = 0; i < stats.tau_grid.size(); ++i) {
        grid << format_double(stats.tau_grid[i]) << ',' << format_double(stats.mean_m[i]) << ','
             << format_double(stats.var_m[i]) << '\n';
    }
    write_text(dir / "stats_m_tau.csv", grid.str());
    std::ostringstream peaks;
    peaks << "trajectory,tau,m,peak_z,sqrt_m_over_tau\n";
    for (const auto& p : stats.peaks) {
        peaks << p.trajectory << ',' << format_double(p.tau) << ',' << p.m << ',' << p.peak_z << ','
              << format_double(p.predicted) << '\n';
    }
    write_text(dir / "stats_peaks.csv", peaks.str());
}

}  // namespace qtraj
