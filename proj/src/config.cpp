#include "qtraj/config.hpp"

#include "qtraj/csv.hpp"
#include "qtraj/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace qtraj {
namespace {

using Keys = std::set<std::string>;

void check_keys(const YAML::Node& node, const std::string& section, const Keys& allowed) {
    if (!node.IsMap()) throw ValidationError("config: '" + section + "' must be a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.contains(key))
            throw ValidationError("config: unknown key '" + key + "' in " + section);
    }
}

std::string scalar(const YAML::Node& node, const std::string& key) {
    if (!node.IsScalar()) throw ValidationError("config: '" + key + "' must be a scalar");
    return node.Scalar();
}

double get_double(const YAML::Node& node, const std::string& key) {
    try {
        return parse_double(scalar(node, key));
    } catch (const ValidationError&) {
        throw ValidationError("config: '" + key + "' is not a decimal number");
    }
}

template <typename Int>
Int get_int(const YAML::Node& node, const std::string& key) {
    const std::string text = scalar(node, key);
    Int value{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw ValidationError("config: '" + key + "' is not an integer");
    return value;
}

bool get_bool(const YAML::Node& node, const std::string& key) {
    const std::string text = scalar(node, key);
    if (text == "true") return true;
    if (text == "false") return false;
    throw ValidationError("config: '" + key + "' must be true or false");
}

cplx get_complex(const YAML::Node& node, const std::string& key) {
    if (node.IsSequence()) {
        if (node.size() != 2) throw ValidationError("config: '" + key + "' must be [re, im]");
        return {get_double(node[0], key), get_double(node[1], key)};
    }
    return {get_double(node, key), 0.0};
}

}  // namespace

RunConfig parse_config(const std::string& yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ValidationError(std::string("config: YAML parse error: ") + e.what());
    }
    RunConfig cfg;
    if (root.IsNull()) return cfg;
    check_keys(root, "top level", {"mode", "engine", "initial_state", "geometry", "cavity", "run"});

    if (root["mode"]) cfg.mode = parse_mode(scalar(root["mode"], "mode"));
    if (root["engine"]) cfg.engine = parse_engine(scalar(root["engine"], "engine"));
    if (root["initial_state"])
        cfg.initial_state = parse_initial_state(scalar(root["initial_state"], "initial_state"));

    bool explicit_k = false;
    bool explicit_q = false;
    if (const auto g = root["geometry"]) {
        check_keys(g, "geometry", {"atoms", "sites", "illuminated", "odd_sites"});
        if (g["atoms"]) cfg.geometry.atoms = get_int<std::int64_t>(g["atoms"], "atoms");
        if (g["sites"]) cfg.geometry.sites = get_int<std::int64_t>(g["sites"], "sites");
        if (g["illuminated"]) {
            cfg.geometry.illuminated = get_int<std::int64_t>(g["illuminated"], "illuminated");
            explicit_k = true;
        }
        if (g["odd_sites"]) {
            cfg.geometry.odd_sites = get_int<std::int64_t>(g["odd_sites"], "odd_sites");
            explicit_q = true;
        }
    }
    if (!explicit_k && cfg.mode == DiffractionMode::minimum) cfg.geometry.illuminated = cfg.geometry.sites;
    if (!explicit_q) cfg.geometry.odd_sites = cfg.geometry.sites / 2;

    CavityParams cav;
    if (const auto c = root["cavity"]) {
        check_keys(c, "cavity",
                   {"g0", "g1", "delta_a", "delta_p", "kappa", "eta", "a0", "dispersive_shift"});
        if (c["g0"]) cav.g0 = get_double(c["g0"], "g0");
        if (c["g1"]) cav.g1 = get_double(c["g1"], "g1");
        if (c["delta_a"]) cav.delta_a = get_double(c["delta_a"], "delta_a");
        if (c["delta_p"]) cav.delta_p = get_double(c["delta_p"], "delta_p");
        if (c["kappa"]) cav.kappa = get_double(c["kappa"], "kappa");
        if (c["eta"]) cav.eta = get_complex(c["eta"], "eta");
        if (c["a0"]) cav.a0 = get_complex(c["a0"], "a0");
        if (c["dispersive_shift"])
            cav.dispersive_shift = get_bool(c["dispersive_shift"], "dispersive_shift");
    }
    cfg.cavity = cav.in_kappa_units();

    if (const auto r = root["run"]) {
        check_keys(r, "run",
                   {"tau_max", "dtau", "max_step_probability", "master_seed", "trajectories",
                    "workers", "snapshot_every", "record_every", "output_dir", "prune_window",
                    "gaussian_min_atoms", "basis_cap", "minimum_form"});
        auto& ctl = cfg.control;
        if (r["tau_max"]) ctl.tau_max = get_double(r["tau_max"], "tau_max");
        if (r["dtau"]) ctl.dtau = get_double(r["dtau"], "dtau");
        if (r["max_step_probability"])
            ctl.max_step_probability = get_double(r["max_step_probability"], "max_step_probability");
        if (r["snapshot_every"])
            ctl.snapshot_every = get_int<std::int64_t>(r["snapshot_every"], "snapshot_every");
        if (r["record_every"])
            ctl.record_every = get_int<std::int64_t>(r["record_every"], "record_every");
        if (r["master_seed"]) cfg.master_seed = get_int<std::uint64_t>(r["master_seed"], "master_seed");
        if (r["trajectories"])
            cfg.trajectories = get_int<std::int64_t>(r["trajectories"], "trajectories");
        if (r["workers"]) cfg.workers = get_int<std::int64_t>(r["workers"], "workers");
        if (r["output_dir"]) cfg.output_dir = scalar(r["output_dir"], "output_dir");
        if (r["prune_window"]) cfg.prune_window = get_double(r["prune_window"], "prune_window");
        if (r["gaussian_min_atoms"])
            cfg.gaussian_min_atoms = get_int<std::int64_t>(r["gaussian_min_atoms"], "gaussian_min_atoms");
        if (r["basis_cap"]) cfg.basis_cap = get_int<std::int64_t>(r["basis_cap"], "basis_cap");
        if (r["minimum_form"]) {
            const auto form = scalar(r["minimum_form"], "minimum_form");
            if (form == "derived") cfg.minimum_form = MinimumForm::derived;
            else if (form == "printed") cfg.minimum_form = MinimumForm::printed;
            else throw ValidationError("config: minimum_form must be derived or printed");
        }
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

nlohmann::ordered_json config_to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["mode"] = to_string(c.mode);
    j["engine"] = to_string(c.engine);
    j["initial_state"] = to_string(c.initial_state);
    j["geometry"] = {{"atoms", c.geometry.atoms},
                     {"sites", c.geometry.sites},
                     {"illuminated", c.geometry.illuminated},
                     {"odd_sites", c.geometry.odd_sites}};
    const auto& cav = c.cavity;
    j["cavity"] = {{"units", "kappa"},
                   {"g0", cav.g0},
                   {"g1", cav.g1},
                   {"delta_a", cav.delta_a},
                   {"delta_p", cav.delta_p},
                   {"kappa", cav.kappa},
                   {"eta", {cav.eta.real(), cav.eta.imag()}},
                   {"a0", {cav.a0.real(), cav.a0.imag()}},
                   {"dispersive_shift", cav.dispersive_shift}};
    j["run"] = {{"tau_max", c.control.tau_max},
                {"dtau", c.control.dtau},
                {"max_step_probability", c.control.max_step_probability},
                {"snapshot_every", c.control.snapshot_every},
                {"record_every", c.control.record_every},
                {"master_seed", c.master_seed},
                {"trajectories", c.trajectories},
                {"prune_window", c.prune_window},
                {"gaussian_min_atoms", c.gaussian_min_atoms},
                {"basis_cap", c.basis_cap},
                {"minimum_form", c.minimum_form == MinimumForm::derived ? "derived" : "printed"}};
    return j;
}

}  // namespace qtraj
