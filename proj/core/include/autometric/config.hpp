#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "autometric/architecture.hpp"

namespace autometric {

inline constexpr int kConfigSchemaVersion = 1;

/// Architecture as a JSON document:
///
///   {
///     "schema_version": 1,
///     "name": "takeover",
///     "sensors": ["distance", "lane", "speed"],
///     "stages": [{
///       "name": "rightwrong",
///       "grid_points": 1001,
///       "inputs": [{"name": "distance", "range": [1, 10], "source": {"sensor": "distance"},
///                   "terms": [{"label": "lowrisk", "shape": "trapmf", "params": [0, 0, 5, 6]}, ...]}],
///       "output": {"name": "tcrightwrong", "range": [1, 10], "terms": [...]},
///       "rules": [{"name": "RWP1", "if": [["distance", "lowrisk"], ...], "then": ["tcrightwrong", "tcwrong"]}]
///     }, ...]
///   }
///
/// Stage inputs read either {"sensor": name} or {"stage": name}.
std::string architecture_to_json(const EthicsArchitecture& arch);

/// Every structural and semantic problem in a config document; empty when it
/// loads cleanly.
std::vector<std::string> validate_config(std::string_view json_text);

/// Throws ParseError for malformed JSON or a wrong document shape and
/// ValidationError when the described architecture breaks an invariant.
EthicsArchitecture architecture_from_json(std::string_view json_text);

/// Throws IoError when the file cannot be read.
EthicsArchitecture load_architecture(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace autometric
