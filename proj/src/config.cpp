#include "maq/config.hpp"

#include <fstream>
#include <set>

namespace maq {

namespace {

GridSpec grid_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigInvalid("grid must be an object");
  for (const char* key : {"nx", "ny", "x0", "y0", "h"})
    if (!j.contains(key)) throw ConfigInvalid(std::string("grid missing ") + key);
  GridSpec g;
  g.nx = j.at("nx").get<int>();
  g.ny = j.at("ny").get<int>();
  g.x0 = j.at("x0").get<double>();
  g.y0 = j.at("y0").get<double>();
  g.h = j.at("h").get<double>();
  if (g.h <= 0) throw ConfigInvalid("grid spacing must be positive");
  if (g.nx < 5 || g.ny < 5) throw ConfigInvalid("grid must be at least 5x5");
  return g;
}

}  // namespace

ExperimentConfig parse_config_json(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.empty())
    throw ConfigInvalid("config must be a non-empty JSON object");

  static const std::set<std::string> known = {"command", "grid",      "params",
                                              "tolerances", "seed", "out"};
  for (const auto& [key, _] : doc.items())
    if (!known.count(key)) throw ConfigInvalid("unknown config key: " + key);

  ExperimentConfig cfg;
  if (doc.contains("command")) {
    if (!doc.at("command").is_string()) throw ConfigInvalid("command must be a string");
    cfg.command = doc.at("command").get<std::string>();
  }
  if (doc.contains("grid")) cfg.grid = grid_from_json(doc.at("grid"));
  if (doc.contains("params")) {
    if (!doc.at("params").is_object()) throw ConfigInvalid("params must be an object");
    cfg.params = doc.at("params");
  }
  if (doc.contains("tolerances")) {
    if (!doc.at("tolerances").is_object())
      throw ConfigInvalid("tolerances must be an object");
    cfg.tolerances = doc.at("tolerances");
  }
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_integer() || doc.at("seed").get<long long>() < 0)
      throw ConfigInvalid("seed must be a non-negative integer");
    cfg.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("out")) {
    if (!doc.at("out").is_string()) throw ConfigInvalid("out must be a string");
    cfg.out_dir = doc.at("out").get<std::string>();
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open config: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigInvalid(std::string("config parse error: ") + e.what());
  }
  return parse_config_json(doc);
}

double tolerance_or(const ExperimentConfig& cfg, const std::string& key,
                    double fallback) {
  if (cfg.tolerances.contains(key)) return cfg.tolerances.at(key).get<double>();
  return fallback;
}

}  // namespace maq
