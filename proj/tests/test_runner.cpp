#include "qtraj/config.hpp"
#include "qtraj/csv.hpp"
#include "qtraj/ensemble.hpp"
#include "qtraj/errors.hpp"
#include "qtraj/exact_engine.hpp"

#include <doctest.h>

#include <algorithm>
#include <clocale>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace qtraj;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("qtraj_test_" + name);
    fs::remove_all(p);
    return p;
}

RunConfig small_config(const fs::path& out) {
    RunConfig c;
    c.geometry = LatticeGeometry::minimum(100, 2);
    c.control.tau_max = 0.1;
    c.control.dtau = 1e-3;
    c.control.snapshot_every = 25;
    c.trajectories = 6;
    c.master_seed = 77;
    c.output_dir = out;
    return c;
}

}  // namespace

TEST_CASE("decimal formatting round-trips without locale") {
    const char* previous = std::setlocale(LC_NUMERIC, nullptr);
    const std::string saved = previous ? previous : "C";
    // a comma-decimal locale, when installed, must not leak into the output
    std::setlocale(LC_NUMERIC, "de_DE.UTF-8");
    for (double v : {0.1, -2.5e-300, 1e22, 123456.789, 0.0}) {
        CHECK(parse_double(format_double(v)) == v);
        CHECK(format_double(v).find(',') == std::string::npos);
    }
    CHECK(parse_double("2.5") == 2.5);
    CHECK_THROWS_AS(parse_double("2,5"), ValidationError);
    CHECK_THROWS_AS(parse_double("abc"), ValidationError);
    CHECK_THROWS_AS(parse_double(""), ValidationError);
    std::setlocale(LC_NUMERIC, saved.c_str());
}

TEST_CASE("config parsing") {
    const auto cfg = parse_config(R"(
mode: maximum
engine: gaussian
geometry: {atoms: 10000, sites: 10, illuminated: 3}
cavity:
  g0: 2.0
  g1: 1.0
  delta_a: -20.0
  kappa: 2.0
  a0: [0.1, 0.2]
run:
  tau_max: 0.5
  dtau: 1e-5
  master_seed: 18446744073709551615
  trajectories: 12
  workers: 3
  output_dir: out/here
)");
    CHECK(cfg.mode == DiffractionMode::maximum);
    CHECK(cfg.engine == EngineKind::gaussian);
    CHECK(cfg.geometry.illuminated == 3);
    CHECK(cfg.geometry.odd_sites == 5);
    CHECK(cfg.cavity.kappa == 1.0);
    CHECK(cfg.cavity.g0 == 1.0);
    CHECK(cfg.cavity.delta_a == -10.0);
    CHECK(cfg.cavity.a0 == cplx{0.1, 0.2});
    CHECK(cfg.control.dtau == 1e-5);
    CHECK(cfg.master_seed == 18446744073709551615ULL);
    CHECK(cfg.workers == 3);
    CHECK(cfg.output_dir == fs::path("out/here"));
    CHECK_NOTHROW(cfg.validate());

    const auto minimum = parse_config("geometry: {atoms: 50, sites: 6}");
    CHECK(minimum.geometry.illuminated == 6);
    CHECK(minimum.geometry.odd_sites == 3);
}

TEST_CASE("config errors name the problem") {
    CHECK_THROWS_WITH_AS(parse_config("run: {tau_maks: 1}"), doctest::Contains("tau_maks"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config("run: {dtau: fast}"), doctest::Contains("dtau"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config("geometry: {atoms: 1.5}"), doctest::Contains("atoms"), ValidationError);
    CHECK_THROWS_AS(parse_config("mode: diagonal"), ValidationError);
    CHECK_THROWS_AS(parse_config("run: [1, 2"), ValidationError);
    CHECK_THROWS_AS(load_config("/nonexistent/run.yaml"), ValidationError);

    auto cfg = parse_config("mode: maximum\nengine: gaussian\ngeometry: {atoms: 1000, sites: 4, illuminated: 4}");
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("K < M"), ValidationError);
    cfg = parse_config("mode: maximum\nengine: full\ngeometry: {atoms: 40, sites: 10, illuminated: 2}");
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("basis_cap"), ValidationError);
    cfg = parse_config("engine: gaussian\ngeometry: {atoms: 20, sites: 2}");
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = parse_config("run: {trajectories: -1}");
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("ensembles do not depend on the worker count") {
    auto cfg = small_config(scratch("workers"));
    cfg.workers = 1;
    const auto one = run_ensemble(cfg);
    cfg.workers = 4;
    const auto four = run_ensemble(cfg);
    REQUIRE(one.size() == four.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].seed == trajectory_seed(77, i));
        CHECK(one[i].jump_times == four[i].jump_times);
        CHECK(one[i].final_m == four[i].final_m);
    }
}

TEST_CASE("written runs are byte-identical and fully hashed") {
    const auto a = scratch("run_a");
    const auto b = scratch("run_b");
    auto cfg = small_config(a);
    write_run(cfg, run_ensemble(cfg));
    cfg.output_dir = b;
    cfg.workers = 3;
    const auto files = write_run(cfg, run_ensemble(cfg));

    std::set<std::string> listed;
    const auto manifest = nlohmann::json::parse(slurp(b / "manifest.json"));
    for (const auto& f : manifest["files"]) {
        const auto name = f["file"].get<std::string>();
        listed.insert(name);
        CHECK(f["sha256"].get<std::string>() == sha256_file(b / name));
        CHECK(slurp(a / name) == slurp(b / name));
    }
    for (const auto& entry : fs::directory_iterator(b)) {
        const auto name = entry.path().filename().string();
        if (name != "manifest.json") CHECK(listed.contains(name));
    }
    CHECK(files.size() == listed.size() + 1);
    CHECK(manifest["seed_rule"].get<std::string>().find("splitmix64") != std::string::npos);
    CHECK(manifest["parameters"]["run"]["master_seed"].get<std::uint64_t>() == 77);

    const auto csv = slurp(b / "traj_00000.csv");
    CHECK(csv.rfind("tau,m,photon_expectation\n", 0) == 0);
    CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("sha256 of a known string") {
    const auto p = scratch("sha") ;
    fs::create_directories(p);
    std::ofstream(p / "abc.txt", std::ios::binary) << "abc";
    CHECK(sha256_file(p / "abc.txt") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("zero trajectories write the manifest only") {
    auto cfg = small_config(scratch("empty"));
    cfg.trajectories = 0;
    const auto files = write_run(cfg, run_ensemble(cfg));
    CHECK(files == std::vector<std::string>{"manifest.json"});
    CHECK(std::distance(fs::directory_iterator(cfg.output_dir), fs::directory_iterator{}) == 1);
}

TEST_CASE("load_run restores what write_run stored") {
    auto cfg = small_config(scratch("load"));
    const auto records = run_ensemble(cfg);
    write_run(cfg, records);
    const auto loaded = load_run(cfg.output_dir);
    REQUIRE(loaded.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(loaded[i].seed == records[i].seed);
        CHECK(loaded[i].jump_times == records[i].jump_times);
        CHECK(loaded[i].snapshots.size() == records[i].snapshots.size());
        CHECK(loaded[i].final_tau == records[i].final_tau);
    }
    const auto s1 = ensemble_stats(records);
    const auto s2 = ensemble_stats(loaded);
    CHECK(s1.mean_m == s2.mean_m);
    CHECK(s1.peaks.size() == s2.peaks.size());
}

TEST_CASE("ensemble statistics") {
    CHECK_THROWS_AS(ensemble_stats(std::vector<TrajectoryRecord>{}), ValidationError);

    SUBCASE("zero duration") {
        auto cfg = small_config(scratch("zero"));
        cfg.control.tau_max = 0.0;
        const auto stats = ensemble_stats(run_ensemble(cfg));
        CHECK(stats.tau_grid.empty());
        CHECK(stats.peaks.empty());
        CHECK(stats.total_counts == 0);
    }
    SUBCASE("Fock-state ensemble counts at rate z1^2") {
        const std::int64_t z1 = 3;
        const AtomNumberDistribution fock(DiffractionMode::maximum, {z1}, {0.0});
        StepControl c;
        c.tau_max = 2.0;
        c.dtau = 1e-3;
        std::vector<TrajectoryRecord> records;
        for (int i = 0; i < 400; ++i) records.push_back(run_trajectory(fock, cplx{0.0, 0.1}, c, trajectory_seed(5, i)));
        const auto stats = ensemble_stats(records);
        const double expected = z1 * z1;
        const double sigma = std::sqrt(expected / stats.total_tau);
        CHECK(std::abs(stats.mean_rate() - expected) < 3.0 * sigma);
        CHECK(stats.mean_m.front() == 0.0);
        CHECK(stats.mean_m.back() == doctest::Approx(expected * c.tau_max).epsilon(0.1));
    }
    SUBCASE("peaks and files") {
        auto cfg = small_config(scratch("stats"));
        const auto records = run_ensemble(cfg);
        const auto stats = ensemble_stats(records, 11);
        CHECK(stats.tau_grid.size() == 11);
        CHECK(stats.tau_grid.back() == doctest::Approx(0.1));
        for (const auto& p : stats.peaks) {
            CHECK(p.peak_z > 0);
            CHECK(p.support_step == 2);
        }
        write_stats(cfg.output_dir, stats);
        CHECK(slurp(cfg.output_dir / "stats_m_tau.csv").rfind("tau,mean_m,var_m\n", 0) == 0);
        CHECK(fs::exists(cfg.output_dir / "stats_peaks.csv"));
    }
}

TEST_CASE("every engine runs through the ensemble driver") {
    auto cfg = small_config(scratch("engines"));
    cfg.trajectories = 2;
    cfg.control.snapshot_every = 0;
    cfg.mode = DiffractionMode::maximum;
    cfg.geometry = LatticeGeometry::maximum(4, 2, 1);
    cfg.cavity.dispersive_shift = false;
    cfg.engine = EngineKind::full;
    auto full = run_ensemble(cfg);
    CHECK(full.front().engine == "full");
    cfg.engine = EngineKind::exact;
    auto exact = run_ensemble(cfg);
    // same seeds and identical jump probabilities give the same decisions
    CHECK(full.front().jump_times.size() == exact.front().jump_times.size());

    cfg.geometry = LatticeGeometry::maximum(1000, 4, 1);
    cfg.engine = EngineKind::gaussian;
    CHECK(run_ensemble(cfg).front().engine == "gaussian");
    cfg.engine = EngineKind::exact;
    cfg.initial_state = InitialState::gaussian;
    CHECK(run_ensemble(cfg).front().engine == "exact");
}

TEST_CASE("full-engine runs store the atomic density matrix") {
    auto cfg = small_config(scratch("rho"));
    cfg.trajectories = 2;
    cfg.control.snapshot_every = 0;
    cfg.mode = DiffractionMode::maximum;
    cfg.geometry = LatticeGeometry::maximum(4, 2, 1);
    cfg.engine = EngineKind::full;
    const auto records = run_ensemble(cfg);
    REQUIRE(records.front().final_density);
    const auto& d = *records.front().final_density;
    CHECK(d.basis.size() == 5);
    CHECK(std::abs(d.rho.trace() - cplx{1.0, 0.0}) < 1e-12);
    CHECK((d.rho - d.rho.adjoint()).cwiseAbs().maxCoeff() < 1e-14);

    const auto files = write_run(cfg, records);
    CHECK(std::count(files.begin(), files.end(), "traj_00000_rho.json") == 1);
    const auto loaded = load_run(cfg.output_dir);
    REQUIRE(loaded.size() == 2);
    REQUIRE(loaded.front().final_density);
    CHECK(loaded.front().final_density->basis == d.basis);
    CHECK((loaded.front().final_density->rho - d.rho).cwiseAbs().maxCoeff() < 1e-15);

    cfg.engine = EngineKind::exact;
    CHECK_FALSE(run_ensemble(cfg).front().final_density);
}
