#include "manifest.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include "autometric/error.hpp"

namespace autometric::cli {

using json = nlohmann::ordered_json;

std::string_view labeling_name(Labeling l) noexcept {
  switch (l) {
    case Labeling::none: return "none";
    case Labeling::takeover: return "takeover";
    case Labeling::dilemma: return "dilemma";
  }
  return "none";
}

std::optional<Labeling> parse_labeling(std::string_view name) noexcept {
  if (name == "none") return Labeling::none;
  if (name == "takeover") return Labeling::takeover;
  if (name == "dilemma") return Labeling::dilemma;
  return std::nullopt;
}

std::string manifest_to_json(const RunManifest& m) {
  json gens = json::object();
  for (const auto& [channel, g] : m.schedule.generators)
    gens[channel] = {{"waveform", std::string(waveform_name(g.waveform))}, {"min", g.min}, {"max", g.max}, {"cycles", g.cycles}};
  json doc = {
      {"tool", "autometric"},
      {"tool_version", m.tool_version},
      {"command", "simulate"},
      {"architecture", m.architecture},
      {"grid_points", m.grid_points ? json(*m.grid_points) : json(nullptr)},
      {"schedule", {{"duration", m.schedule.duration}, {"steps", m.schedule.steps}, {"generators", gens}}},
      {"labeling", std::string(labeling_name(m.labeling))},
      {"seed", m.seed ? json(*m.seed) : json(nullptr)},
      {"outputs", {{"csv", m.csv_path}, {"plot_data", m.plot_data_path}}},
  };
  return doc.dump(2) + "\n";
}

RunManifest manifest_from_json(std::string_view text) {
  try {
    const auto doc = json::parse(text);
    RunManifest m;
    m.tool_version = doc.value("tool_version", "");
    m.architecture = doc.at("architecture").get<std::string>();
    if (doc.contains("grid_points") && !doc.at("grid_points").is_null()) m.grid_points = doc.at("grid_points").get<std::size_t>();
    const auto& sched = doc.at("schedule");
    m.schedule.duration = sched.at("duration").get<double>();
    m.schedule.steps = sched.at("steps").get<std::size_t>();
    for (const auto& [channel, g] : sched.at("generators").items()) {
      const auto wave = parse_waveform(g.at("waveform").get<std::string>());
      if (!wave) throw ParseError(fmt::format("manifest: generator '{}' has an unknown waveform", channel), 0);
      m.schedule.generators.emplace(
          channel, SignalGenerator{*wave, g.at("min").get<double>(), g.at("max").get<double>(), g.at("cycles").get<double>(),
                                   m.schedule.duration});
    }
    const auto labeling = parse_labeling(doc.value("labeling", "none"));
    if (!labeling) throw ParseError("manifest: unknown labeling", 0);
    m.labeling = *labeling;
    if (doc.contains("seed") && !doc.at("seed").is_null()) m.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("outputs")) {
      m.csv_path = doc.at("outputs").value("csv", "");
      m.plot_data_path = doc.at("outputs").value("plot_data", "");
    }
    return m;
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("malformed manifest: {}", e.what()), 0);
  }
}

}  // namespace autometric::cli
