#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "autometric/simulation.hpp"

namespace autometric::cli {

enum class Labeling { none, takeover, dilemma };

std::string_view labeling_name(Labeling l) noexcept;
std::optional<Labeling> parse_labeling(std::string_view name) noexcept;

/// Everything needed to regenerate a simulation run bit for bit.
struct RunManifest {
  std::string tool_version;
  std::string architecture;  // builtin name or config path
  std::optional<std::size_t> grid_points;
  SimulationSchedule schedule;
  Labeling labeling = Labeling::none;
  std::optional<std::uint64_t> seed;
  std::string csv_path;
  std::string plot_data_path;
};

std::string manifest_to_json(const RunManifest& m);
/// Throws ParseError for a malformed manifest.
RunManifest manifest_from_json(std::string_view text);

}  // namespace autometric::cli
