#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "leggett/experiment.hpp"
#include "leggett/nlhv_model.hpp"

namespace leggett {

/// Flat key-value JSON for an experiment run. Angles are in degrees:
///
///   alpha1_deg, alpha2_deg, beta1_deg, beta2_deg, beta3_deg   numbers
///   alpha1_plane ... beta3_plane        "linear" | "rotated"
///   visibility                          scalar V (default 1)
///   visibility_linear, visibility_circular   optional per-plane overrides
///   mean_pairs                          > 0
///   seed                                unsigned integer
///   phi_grid_deg                        array of numbers (sweeps only)
///   error_propagation                   "termwise" | "gradient"
///
/// Missing keys take the defaults of ExperimentConfig; unknown keys and
/// wrongly typed values raise ConfigError.
ExperimentConfig config_from_json(const nlohmann::json &j);
nlohmann::json config_to_json(const ExperimentConfig &cfg);
ExperimentConfig load_config(const std::string &path);

/// {"kind": "singlet_two_point"}
/// {"kind": "fixed_pair", "u": [x, y, z], "v": [x, y, z]}
/// {"kind": "weighted_list", "pairs": [{"u": [...], "v": [...], "weight": w}, ...]}
SourceModel source_from_json(const nlohmann::json &j);
nlohmann::json source_to_json(const SourceModel &source);

/// "start:stop:step" in degrees, inclusive of stop when it lies on the grid.
/// Throws ConfigError for a malformed or empty range.
std::vector<double> parse_phi_range(const std::string &range);

/// Seed from the LEGGETT_SEED environment variable, or `fallback` if unset.
std::uint64_t default_seed(std::uint64_t fallback = 42);

} // namespace leggett
