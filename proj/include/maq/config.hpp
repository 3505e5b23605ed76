#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "maq/field2d.hpp"

namespace maq {

struct ExperimentConfig {
  std::string command;
  std::optional<GridSpec> grid;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json tolerances = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::string out_dir = "out";
};

// Parses and schema-checks a JSON config document. Unknown top-level keys,
// malformed grids, or an empty document raise ConfigInvalid.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_json(const nlohmann::json& doc);

double tolerance_or(const ExperimentConfig& cfg, const std::string& key,
                    double fallback);

}  // namespace maq
