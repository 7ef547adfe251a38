// qtraj: batch front end for the conditional photocount trajectories.
//
//   qtraj run [--config run.yaml] [overrides...]
//   qtraj verify [--json report.json] [--inject-printed-minimum]
//   qtraj stats --dir RUN_DIR [--grid 101] [--out DIR]
//   qtraj purity-sweep [--alpha-max 3] [--alpha-steps 30] [--phi-steps 30] [--out FILE]
//
// Exit status: 0 ok, 1 invalid input or failed run, 2 failed verification.

#include "qtraj/config.hpp"
#include "qtraj/ensemble.hpp"
#include "qtraj/errors.hpp"
#include "qtraj/purity.hpp"
#include "qtraj/verify.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitVerify = 2;

// |C|^2 <z^2> above this is reported as outside the weak-scattering regime
constexpr double kStrongScattering = 10.0;

struct RunOverrides {
    std::string config_path;
    std::optional<std::string> mode;
    std::optional<std::string> engine;
    std::optional<std::string> initial_state;
    std::optional<std::int64_t> atoms;
    std::optional<std::int64_t> sites;
    std::optional<std::int64_t> illuminated;
    std::optional<double> tau_max;
    std::optional<double> dtau;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> trajectories;
    std::optional<std::int64_t> workers;
    std::optional<std::int64_t> snapshot_every;
    std::optional<std::int64_t> record_every;
    std::optional<std::string> output_dir;
    std::optional<std::string> minimum_form;
    bool stats = false;
};

qtraj::RunConfig build_config(const RunOverrides& o) {
    qtraj::RunConfig cfg = o.config_path.empty() ? qtraj::parse_config("{}")
                                                 : qtraj::load_config(o.config_path);
    if (o.mode) cfg.mode = qtraj::parse_mode(*o.mode);
    if (o.engine) cfg.engine = qtraj::parse_engine(*o.engine);
    if (o.initial_state) cfg.initial_state = qtraj::parse_initial_state(*o.initial_state);
    if (o.atoms) cfg.geometry.atoms = *o.atoms;
    if (o.sites || o.mode) {
        if (o.sites) cfg.geometry.sites = *o.sites;
        if (cfg.mode == qtraj::DiffractionMode::minimum) {
            cfg.geometry.illuminated = cfg.geometry.sites;
            cfg.geometry.odd_sites = cfg.geometry.sites / 2;
        }
    }
    if (o.illuminated) cfg.geometry.illuminated = *o.illuminated;
    if (o.tau_max) cfg.control.tau_max = *o.tau_max;
    if (o.dtau) cfg.control.dtau = *o.dtau;
    if (o.seed) cfg.master_seed = *o.seed;
    if (o.trajectories) cfg.trajectories = *o.trajectories;
    if (o.workers) cfg.workers = *o.workers;
    if (o.snapshot_every) cfg.control.snapshot_every = *o.snapshot_every;
    if (o.record_every) cfg.control.record_every = *o.record_every;
    if (o.minimum_form) {
        if (*o.minimum_form == "derived") cfg.minimum_form = qtraj::MinimumForm::derived;
        else if (*o.minimum_form == "printed") cfg.minimum_form = qtraj::MinimumForm::printed;
        else throw qtraj::ValidationError("minimum_form must be derived|printed");
    }
    if (const char* env = std::getenv("QTRAJ_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
    if (o.output_dir) cfg.output_dir = *o.output_dir;
    cfg.validate();
    return cfg;
}

int do_run(const RunOverrides& o) {
    const auto cfg = build_config(o);
    const double photons =
        std::norm(qtraj::ScatteringScales::from(cfg.cavity).C) * qtraj::initial_second_moment(cfg);
    if (photons > kStrongScattering) {
        std::cerr << "warning: initial |C|^2 <z^2> = " << photons
                  << " >> 1; strong scattering, first count expected well before 1/kappa\n";
    }
    const auto records = qtraj::run_ensemble(cfg);
    const auto files = qtraj::write_run(cfg, records);
    std::cout << "wrote " << files.size() << " files to " << cfg.output_dir.string() << '\n';
    if (o.stats && !records.empty()) {
        qtraj::write_stats(cfg.output_dir, qtraj::ensemble_stats(records));
        std::cout << "wrote stats_m_tau.csv, stats_peaks.csv\n";
    }
    return kExitOk;
}

int do_verify(const std::string& json_path, bool inject_printed) {
    qtraj::VerifyOptions options;
    options.inject_printed_minimum = inject_printed;
    const auto report = qtraj::run_verification(options);
    report.print_table(std::cout);
    if (!json_path.empty()) {
        std::ofstream out(json_path, std::ios::binary);
        if (!out) throw qtraj::ValidationError("cannot write " + json_path);
        out << report.to_json().dump(2) << '\n';
    }
    return report.all_pass() ? kExitOk : kExitVerify;
}

int do_stats(const std::string& dir, std::size_t grid, const std::string& out_dir) {
    const auto records = qtraj::load_run(dir);
    if (records.empty()) {
        std::cout << "no trajectories in " << dir << "; nothing to summarize\n";
        return kExitOk;
    }
    const auto stats = qtraj::ensemble_stats(records, grid);
    const std::string target = out_dir.empty() ? dir : out_dir;
    qtraj::write_stats(target, stats);
    std::cout << "trajectories " << records.size() << ", counts " << stats.total_counts
              << ", mean rate per unit tau " << stats.mean_rate() << ", peak samples "
              << stats.peaks.size() << '\n';
    return kExitOk;
}

int do_purity_sweep(double alpha_max, int alpha_steps, int phi_steps, const std::string& out) {
    const auto rows = qtraj::purity_sweep(alpha_max, alpha_steps, phi_steps);
    if (out.empty()) {
        qtraj::write_purity_sweep_csv(std::cout, rows);
    } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw qtraj::ValidationError("cannot write " + out);
        qtraj::write_purity_sweep_csv(f, rows);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conditional photocount trajectories for atoms in a cavity-probed lattice"};
    app.require_subcommand(1);

    RunOverrides run;
    auto* run_cmd = app.add_subcommand("run", "run a seeded trajectory ensemble");
    run_cmd->add_option("-c,--config", run.config_path, "YAML run configuration")
        ->check(CLI::ExistingFile);
    run_cmd->add_option("--mode", run.mode, "minimum | maximum");
    run_cmd->add_option("--engine", run.engine, "exact | gaussian | full");
    run_cmd->add_option("--initial-state", run.initial_state, "superfluid | gaussian");
    run_cmd->add_option("--atoms", run.atoms, "N");
    run_cmd->add_option("--sites", run.sites, "M");
    run_cmd->add_option("--illuminated", run.illuminated, "K");
    run_cmd->add_option("--tau-max", run.tau_max);
    run_cmd->add_option("--dtau", run.dtau, "initial step in tau");
    run_cmd->add_option("--seed", run.seed, "master seed");
    run_cmd->add_option("--trajectories", run.trajectories);
    run_cmd->add_option("--workers", run.workers);
    run_cmd->add_option("--snapshot-every", run.snapshot_every);
    run_cmd->add_option("--record-every", run.record_every);
    run_cmd->add_option("-o,--output-dir", run.output_dir,
                        "output directory (overrides QTRAJ_OUTPUT_DIR and the config)");
    run_cmd->add_option("--minimum-form", run.minimum_form, "derived | printed");
    run_cmd->add_flag("--stats", run.stats, "also write ensemble statistics");

    std::string json_path;
    bool inject_printed = false;
    auto* verify_cmd = app.add_subcommand("verify", "check closed forms against brute-force oracles");
    verify_cmd->add_option("--json", json_path, "write the report as JSON");
    verify_cmd->add_flag("--inject-printed-minimum", inject_printed,
                         "check the minimum-mode rate with 1/sigma^2 in the denominator");

    std::string stats_dir;
    std::string stats_out;
    std::size_t grid = 101;
    auto* stats_cmd = app.add_subcommand("stats", "summarize a finished run");
    stats_cmd->add_option("-d,--dir", stats_dir, "run directory")->required()->check(CLI::ExistingDirectory);
    stats_cmd->add_option("--grid", grid, "tau grid points")->check(CLI::Range(2, 1000000));
    stats_cmd->add_option("--out", stats_out, "output directory (default: the run directory)");

    double alpha_max = 3.0;
    int alpha_steps = 30;
    int phi_steps = 30;
    std::string sweep_out;
    auto* sweep_cmd = app.add_subcommand("purity-sweep", "purity table over |alpha| and phi");
    sweep_cmd->add_option("--alpha-max", alpha_max)->check(CLI::NonNegativeNumber);
    sweep_cmd->add_option("--alpha-steps", alpha_steps)->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--phi-steps", phi_steps)->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--out", sweep_out, "CSV file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (*run_cmd) return do_run(run);
        if (*verify_cmd) return do_verify(json_path, inject_printed);
        if (*stats_cmd) return do_stats(stats_dir, grid, stats_out);
        if (*sweep_cmd) return do_purity_sweep(alpha_max, alpha_steps, phi_steps, sweep_out);
    } catch (const qtraj::ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return kExitOk;
}
