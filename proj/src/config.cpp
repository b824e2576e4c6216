#include "leggett/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "leggett/errors.hpp"

namespace leggett {
namespace {

using nlohmann::json;

double number_at(const json &j, const char *key) {
  const json &v = j.at(key);
  if (!v.is_number()) throw ConfigError(std::string("config key '") + key + "' must be a number");
  return v.get<double>();
}

PoincareVector vector_from_json(const json &j, const char *what) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number()) {
    throw ConfigError(std::string(what) + " must be an array of three numbers");
  }
  try {
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  } catch (const std::invalid_argument &e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

json vector_to_json(const PoincareVector &p) { return json::array({p.x(), p.y(), p.z()}); }

void read_setting(const json &j, const std::string &name, PolarizerSetting &setting) {
  const std::string deg = name + "_deg";
  const std::string plane = name + "_plane";
  if (j.contains(deg)) setting.angle_deg = number_at(j, deg.c_str());
  if (j.contains(plane)) {
    if (!j.at(plane).is_string()) throw ConfigError("config key '" + plane + "' must be a string");
    setting.plane = parse_setting_plane(j.at(plane).get<std::string>());
  }
}

Visibility visibility_at(const json &j, const char *key) {
  const double v = number_at(j, key);
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(key) + " must lie in [0, 1]");
  return Visibility{v};
}

const std::set<std::string> &known_keys() {
  static const std::set<std::string> keys = [] {
    std::set<std::string> k{"visibility", "visibility_linear", "visibility_circular", "mean_pairs",
                            "seed", "phi_grid_deg", "error_propagation"};
    for (const char *s : {"alpha1", "alpha2", "beta1", "beta2", "beta3"}) {
      k.insert(std::string(s) + "_deg");
      k.insert(std::string(s) + "_plane");
    }
    return k;
  }();
  return keys;
}

} // namespace

ExperimentConfig config_from_json(const json &j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto &[key, _] : j.items()) {
    if (!known_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  ExperimentConfig cfg;
  read_setting(j, "alpha1", cfg.settings.alpha1);
  read_setting(j, "alpha2", cfg.settings.alpha2);
  read_setting(j, "beta1", cfg.settings.beta1);
  read_setting(j, "beta2", cfg.settings.beta2);
  read_setting(j, "beta3", cfg.settings.beta3);
  if (j.contains("visibility")) cfg.visibility.scalar = visibility_at(j, "visibility");
  if (j.contains("visibility_linear")) cfg.visibility.linear = visibility_at(j, "visibility_linear");
  if (j.contains("visibility_circular")) cfg.visibility.circular = visibility_at(j, "visibility_circular");
  if (j.contains("mean_pairs")) {
    cfg.mean_pairs = number_at(j, "mean_pairs");
    if (!(cfg.mean_pairs > 0.0) || !std::isfinite(cfg.mean_pairs)) throw ConfigError("mean_pairs must be > 0");
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed must be a nonnegative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("phi_grid_deg")) {
    const json &grid = j.at("phi_grid_deg");
    if (!grid.is_array()) throw ConfigError("phi_grid_deg must be an array of numbers");
    for (const auto &v : grid) {
      if (!v.is_number()) throw ConfigError("phi_grid_deg must be an array of numbers");
      cfg.phi_grid_deg.push_back(v.get<double>());
    }
  }
  if (j.contains("error_propagation")) {
    if (!j.at("error_propagation").is_string()) throw ConfigError("error_propagation must be a string");
    cfg.propagation = parse_error_propagation(j.at("error_propagation").get<std::string>());
  }
  return cfg;
}

json config_to_json(const ExperimentConfig &cfg) {
  json j;
  const auto put = [&j](const std::string &name, const PolarizerSetting &s) {
    j[name + "_deg"] = s.angle_deg;
    j[name + "_plane"] = std::string(to_string(s.plane));
  };
  put("alpha1", cfg.settings.alpha1);
  put("alpha2", cfg.settings.alpha2);
  put("beta1", cfg.settings.beta1);
  put("beta2", cfg.settings.beta2);
  put("beta3", cfg.settings.beta3);
  j["visibility"] = cfg.visibility.scalar.value();
  if (cfg.visibility.linear) j["visibility_linear"] = cfg.visibility.linear->value();
  if (cfg.visibility.circular) j["visibility_circular"] = cfg.visibility.circular->value();
  j["mean_pairs"] = cfg.mean_pairs;
  j["seed"] = cfg.seed;
  if (!cfg.phi_grid_deg.empty()) j["phi_grid_deg"] = cfg.phi_grid_deg;
  j["error_propagation"] = to_string(cfg.propagation);
  return j;
}

ExperimentConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error &e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

SourceModel source_from_json(const json &j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw ConfigError("source must be an object with a string 'kind'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "singlet_two_point") return SourceModel::singlet_two_point();
  if (kind == "fixed_pair") {
    if (!j.contains("u") || !j.contains("v")) throw ConfigError("fixed_pair source needs 'u' and 'v'");
    return SourceModel::fixed_pair(vector_from_json(j.at("u"), "u"), vector_from_json(j.at("v"), "v"));
  }
  if (kind == "weighted_list") {
    if (!j.contains("pairs") || !j.at("pairs").is_array()) {
      throw ConfigError("weighted_list source needs a 'pairs' array");
    }
    std::vector<WeightedPair> pairs;
    for (const auto &p : j.at("pairs")) {
      if (!p.is_object() || !p.contains("u") || !p.contains("v") || !p.contains("weight")) {
        throw ConfigError("each weighted pair needs 'u', 'v' and 'weight'");
      }
      pairs.push_back({{vector_from_json(p.at("u"), "u"), vector_from_json(p.at("v"), "v")},
                       number_at(p, "weight")});
    }
    try {
      return SourceModel::weighted_list(std::move(pairs));
    } catch (const std::invalid_argument &e) {
      throw ConfigError(std::string("weighted_list source: ") + e.what());
    }
  }
  throw ConfigError("unknown source kind '" + kind + "'");
}

json source_to_json(const SourceModel &source) {
  json j;
  j["kind"] = to_string(source.kind());
  switch (source.kind()) {
  case SourceModel::Kind::SingletTwoPoint:
    break;
  case SourceModel::Kind::FixedPair:
    j["u"] = vector_to_json(source.pairs().front().pair.u);
    j["v"] = vector_to_json(source.pairs().front().pair.v);
    break;
  case SourceModel::Kind::WeightedList: {
    json pairs = json::array();
    for (const auto &p : source.pairs()) {
      pairs.push_back({{"u", vector_to_json(p.pair.u)}, {"v", vector_to_json(p.pair.v)}, {"weight", p.weight}});
    }
    j["pairs"] = std::move(pairs);
    break;
  }
  }
  return j;
}

std::vector<double> parse_phi_range(const std::string &range) {
  std::vector<double> parts;
  std::stringstream ss(range);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception &) {
      throw ConfigError("malformed phi range '" + range + "' (expected start:stop:step in degrees)");
    }
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3) throw ConfigError("malformed phi range '" + range + "' (expected start:stop:step)");
  const double start = parts[0], stop = parts[1], step = parts[2];
  if (!(step > 0.0) || !(stop >= start) || !std::isfinite(start) || !std::isfinite(stop)) {
    throw ConfigError("phi range needs step > 0 and stop >= start");
  }
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  if (count > 1000000) throw ConfigError("phi range has too many points");
  std::vector<double> grid;
  grid.reserve(count);
  for (std::size_t i = 0; i < count; ++i) grid.push_back(start + step * static_cast<double>(i));
  return grid;
}

std::uint64_t default_seed(std::uint64_t fallback) {
  const char *env = std::getenv("LEGGETT_SEED");
  if (env == nullptr || *env == '\0') return fallback;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception &) {
    throw ConfigError(std::string("LEGGETT_SEED is not an unsigned integer: '") + env + "'");
  }
}

} // namespace leggett
