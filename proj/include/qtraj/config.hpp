#pragma once

#include "qtraj/ensemble.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace qtraj {

/// Parses a YAML run configuration. Schema (every key optional, defaults from RunConfig):
///
///   mode: minimum | maximum
///   engine: exact | gaussian | full
///   initial_state: superfluid | gaussian
///   geometry: { atoms, sites, illuminated, odd_sites }
///   cavity: { g0, g1, delta_a, delta_p, kappa, eta, a0, dispersive_shift }
///   run: { tau_max, dtau, max_step_probability, master_seed, trajectories, workers,
///          snapshot_every, record_every, output_dir, prune_window, gaussian_min_atoms,
///          basis_cap, minimum_form }
///
/// eta and a0 take a number or a [re, im] pair. Numbers are parsed with from_chars, so the
/// process locale never matters. Cavity frequencies are rescaled to units of kappa. An
/// omitted illuminated/odd_sites defaults to M and M/2 in minimum mode. Unknown keys are
/// rejected.
RunConfig parse_config(const std::string& yaml_text);
RunConfig load_config(const std::filesystem::path& path);

nlohmann::ordered_json config_to_json(const RunConfig& config);

}  // namespace qtraj
