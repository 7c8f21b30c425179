#include "autometric/simulation.hpp"

#include <charconv>
#include <limits>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "autometric/analysis.hpp"
#include "autometric/error.hpp"

namespace autometric {

std::string_view waveform_name(Waveform w) noexcept {
  switch (w) {
    case Waveform::triangle: return "triangle";
    case Waveform::sawtooth: return "sawtooth";
    case Waveform::sine: return "sine";
  }
  return "unknown";
}

std::optional<Waveform> parse_waveform(std::string_view name) noexcept {
  if (name == "triangle") return Waveform::triangle;
  if (name == "sawtooth") return Waveform::sawtooth;
  if (name == "sine") return Waveform::sine;
  return std::nullopt;
}

std::vector<std::string> SignalGenerator::violations() const {
  std::vector<std::string> out;
  if (!std::isfinite(min) || !std::isfinite(max) || !(min < max))
    out.push_back(fmt::format("signal range [{}, {}] must satisfy min < max", min, max));
  if (!std::isfinite(cycles) || !(cycles > 0.0)) out.push_back(fmt::format("cycles must be positive, got {}", cycles));
  if (!std::isfinite(duration) || !(duration > 0.0))
    out.push_back(fmt::format("duration must be positive, got {}", duration));
  return out;
}

double SignalGenerator::value(double t) const {
  if (!(t >= 0.0 && t <= duration))
    throw RangeError(fmt::format("signal time {} outside [0, {}]", t, duration));
  double u = cycles * t / duration;
  // Snap cycle boundaries so a sawtooth does not read max where it resets.
  if (const double r = std::round(u); std::abs(u - r) <= 1e-12 * std::max(1.0, u)) u = r;
  const double phase = u - std::floor(u);
  double f = 0.0;
  switch (waveform) {
    case Waveform::triangle: f = phase <= 0.5 ? 2.0 * phase : 2.0 - 2.0 * phase; break;
    case Waveform::sawtooth: f = phase; break;
    case Waveform::sine: f = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * u)); break;
  }
  return min + (max - min) * f;
}

double SimulationSchedule::time_at(std::size_t k) const noexcept {
  if (steps < 2) return 0.0;
  if (k + 1 >= steps) return duration;
  return static_cast<double>(k) * duration / static_cast<double>(steps - 1);
}

std::vector<std::string> SimulationSchedule::violations(const std::vector<std::string>& sensors) const {
  std::vector<std::string> out;
  if (steps < 2) out.push_back(fmt::format("steps must be at least 2, got {}", steps));
  if (!std::isfinite(duration) || !(duration > 0.0)) out.push_back(fmt::format("duration must be positive, got {}", duration));
  for (const auto& channel : sensors)
    if (!generators.contains(channel)) out.push_back(fmt::format("no generator for sensor '{}'", channel));
  for (const auto& [channel, gen] : generators) {
    for (const auto& v : gen.violations()) out.push_back(fmt::format("generator '{}': {}", channel, v));
    if (gen.duration != duration)
      out.push_back(fmt::format("generator '{}': duration {} differs from schedule duration {}", channel, gen.duration, duration));
  }
  return out;
}

SimulationSchedule canonical_takeover_schedule(Waveform waveform, std::size_t steps) {
  constexpr double kDuration = 10.0;
  SimulationSchedule s;
  s.duration = kDuration;
  s.steps = steps;
  s.generators = {
      {"speed", {waveform, 0.0, 100.0, 1.0, kDuration}},
      {"lane", {waveform, 1.0, 10.0, 2.0, kDuration}},
      {"distance", {waveform, 1.0, 10.0, 4.0, kDuration}},
  };
  return s;
}

SimulationSchedule canonical_dilemma_schedule(Waveform waveform, std::size_t steps) {
  constexpr double kDuration = 10.0;
  SimulationSchedule s;
  s.duration = kDuration;
  s.steps = steps;
  s.generators = {
      {"straight", {waveform, 1.0, 10.0, 1.0, kDuration}},
      {"swerve", {waveform, 1.0, 10.0, 2.0, kDuration}},
      {"pedestrian", {waveform, 1.0, 10.0, 4.0, kDuration}},
  };
  return s;
}

std::vector<std::string> LabeledDataset::columns() const {
  std::vector<std::string> cols{"time"};
  auto features = feature_names();
  cols.insert(cols.end(), features.begin(), features.end());
  cols.push_back(final_column());
  cols.emplace_back("class");
  return cols;
}

std::vector<std::string> LabeledDataset::feature_names() const {
  std::vector<std::string> names = sensor_names;
  for (const auto& s : stage_names) names.push_back(s + "_out");
  return names;
}

std::vector<double> LabeledDataset::column(std::string_view name) const {
  std::vector<double> out;
  out.reserve(rows.size());
  if (name == "time") {
    for (const auto& r : rows) out.push_back(r.time);
    return out;
  }
  if (name == final_column()) return finals();
  const auto features = feature_names();
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i] != name) continue;
    for (const auto& r : rows) out.push_back(i < sensor_names.size() ? r.sensors[i] : r.stages[i - sensor_names.size()]);
    return out;
  }
  throw LookupError(fmt::format("dataset has no column '{}'", name));
}

std::vector<double> LabeledDataset::finals() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.final);
  return out;
}

LabeledDataset run_simulation(const EthicsArchitecture& arch, const SimulationSchedule& sched) {
  if (auto v = sched.violations(arch.sensors()); !v.empty()) throw ValidationError(std::move(v));

  LabeledDataset ds;
  ds.sensor_names = arch.sensors();
  for (std::size_t i = 0; i + 1 < arch.stages().size(); ++i) ds.stage_names.push_back(arch.stages()[i].name());
  ds.final_name = arch.terminal().name();

  std::vector<const SignalGenerator*> gens;
  for (const auto& channel : arch.sensors()) gens.push_back(&sched.generators.find(channel)->second);

  ds.rows.reserve(sched.steps);
  std::vector<double> sensors(gens.size());
  for (std::size_t k = 0; k < sched.steps; ++k) {
    const double t = sched.time_at(k);
    for (std::size_t c = 0; c < gens.size(); ++c) sensors[c] = gens[c]->value(t);
    const auto trace = arch.evaluate(sensors);
    DataRow row;
    row.time = t;
    row.sensors = sensors;
    for (std::size_t s = 0; s + 1 < trace.stages.size(); ++s) row.stages.push_back(trace.stages[s].value);
    row.final = trace.final;
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

LabeledDataset label_takeover(LabeledDataset ds) {
  for (auto& row : ds.rows) row.label = class_label(classify_takeover(row.final));
  return ds;
}

DilemmaLabeling label_dilemma(LabeledDataset ds) {
  if (ds.empty()) throw Error("cannot label an empty dilemma dataset");
  const double cut = median(ds.finals());
  for (auto& row : ds.rows) row.label = row.final < cut ? std::string(kStraightAheadLabel) : std::string(kSwerveLabel);
  return {std::move(ds), cut};
}

namespace {

std::string number(double v) { return fmt::format("{:.6g}", v); }

void write_line(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    out << fields[i];
  }
  out << '\n';
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool ends_with_out(std::string_view s) { return s.size() > 4 && s.substr(s.size() - 4) == "_out"; }

double parse_number(std::string_view field, std::size_t line, std::string_view column) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ParseError(fmt::format("column '{}': '{}' is not a finite number", column, field), line);
  return v;
}

}  // namespace

std::size_t export_csv(const LabeledDataset& ds, std::ostream& out) {
  write_line(out, ds.columns());
  std::vector<std::string> fields;
  for (const auto& row : ds.rows) {
    fields.clear();
    fields.push_back(number(row.time));
    for (double v : row.sensors) fields.push_back(number(v));
    for (double v : row.stages) fields.push_back(number(v));
    fields.push_back(number(row.final));
    fields.push_back(row.label);
    write_line(out, fields);
  }
  return ds.rows.size();
}

std::size_t export_csv(const LabeledDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  const auto n = export_csv(ds, out);
  out.flush();
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
  return n;
}

LabeledDataset read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = split(line);
  if (header.size() < 4 || header.front() != "time" || header.back() != "class")
    throw ParseError("header must be time,<sensors...>,<stage>_out...,class", 1);
  LabeledDataset ds;
  std::size_t first_out = 1;
  while (first_out + 1 < header.size() && !ends_with_out(header[first_out])) ds.sensor_names.emplace_back(header[first_out++]);
  if (ds.sensor_names.empty()) throw ParseError("header names no sensor columns", 1);
  if (first_out + 1 >= header.size()) throw ParseError("header names no <stage>_out columns", 1);
  for (std::size_t i = first_out; i + 1 < header.size(); ++i) {
    if (!ends_with_out(header[i])) throw ParseError(fmt::format("column '{}' after stage outputs must end in _out", header[i]), 1);
    const auto stage = std::string(header[i].substr(0, header[i].size() - 4));
    if (i + 2 < header.size()) ds.stage_names.push_back(stage);
    else ds.final_name = stage;
  }

  std::size_t line_no = 1;
  double last_time = -std::numeric_limits<double>::infinity();
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size())
      throw ParseError(fmt::format("expected {} fields, got {}", header.size(), fields.size()), line_no);
    DataRow row;
    row.time = parse_number(fields[0], line_no, "time");
    if (row.time < last_time) throw ParseError("rows are not in time order", line_no);
    last_time = row.time;
    for (std::size_t i = 1; i < first_out; ++i) row.sensors.push_back(parse_number(fields[i], line_no, header[i]));
    for (std::size_t i = first_out; i + 2 < header.size(); ++i) row.stages.push_back(parse_number(fields[i], line_no, header[i]));
    row.final = parse_number(fields[header.size() - 2], line_no, header[header.size() - 2]);
    row.label = std::string(fields.back());
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

LabeledDataset read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
  return read_csv(in);
}

std::size_t export_plot_data(const LabeledDataset& ds, std::ostream& out,
                             const std::map<std::string, double, std::less<>>& scale) {
  std::vector<std::string> names = ds.feature_names();
  names.push_back(ds.final_column());
  std::vector<std::string> header{"time"};
  std::vector<double> factors;
  for (const auto& n : names) {
    auto it = scale.find(n);
    factors.push_back(it == scale.end() ? 1.0 : it->second);
    header.push_back(it == scale.end() ? n : fmt::format("{}_x{}", n, it->second));
  }
  write_line(out, header);
  std::vector<std::vector<double>> cols;
  for (const auto& n : names) cols.push_back(ds.column(n));
  std::vector<std::string> fields;
  for (std::size_t r = 0; r < ds.rows.size(); ++r) {
    fields.clear();
    fields.push_back(number(ds.rows[r].time));
    for (std::size_t c = 0; c < cols.size(); ++c) fields.push_back(number(cols[c][r] * factors[c]));
    write_line(out, fields);
  }
  return ds.rows.size();
}

}  // namespace autometric
