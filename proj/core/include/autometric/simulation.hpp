#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autometric/architecture.hpp"

namespace autometric {

enum class Waveform { triangle, sawtooth, sine };

std::string_view waveform_name(Waveform w) noexcept;
std::optional<Waveform> parse_waveform(std::string_view name) noexcept;

/// Cyclic test signal over [0, duration], starting at `min`.
///   triangle: min -> max over the first half of each cycle, back over the second
///   sawtooth: min -> max each cycle, then reset
///   sine:     min + (max - min) * (1 - cos(2 pi cycles t / duration)) / 2
struct SignalGenerator {
  Waveform waveform = Waveform::triangle;
  double min = 0.0;
  double max = 1.0;
  double cycles = 1.0;
  double duration = 1.0;

  std::vector<std::string> violations() const;

  /// Throws RangeError for t outside [0, duration].
  double value(double t) const;
};

inline double signal_value(const SignalGenerator& gen, double t) { return gen.value(t); }

/// Fixed-step sampling: t_k = k * duration / (steps - 1), k = 0 .. steps - 1.
struct SimulationSchedule {
  std::map<std::string, SignalGenerator, std::less<>> generators;
  double duration = 10.0;
  std::size_t steps = 2;

  double time_at(std::size_t k) const noexcept;

  /// Checks the schedule against the sensor channels it has to drive.
  std::vector<std::string> violations(const std::vector<std::string>& sensors) const;
};

/// speed 1 cycle over [0, 100] mph, lane 2 cycles and distance 4 cycles over
/// [1, 10], for 10 time units.
SimulationSchedule canonical_takeover_schedule(Waveform waveform = Waveform::triangle, std::size_t steps = 308);

/// straight 1 cycle, swerve 2 cycles, pedestrian 4 cycles, all over [1, 10],
/// for 10 time units.
SimulationSchedule canonical_dilemma_schedule(Waveform waveform = Waveform::triangle, std::size_t steps = 26);

struct DataRow {
  double time = 0.0;
  std::vector<double> sensors;
  std::vector<double> stages;  // non-terminal stage outputs
  double final = 0.0;
  std::string label;           // empty when unlabeled
};

/// One row per simulation step, in time order. Column layout:
///   time, <sensors...>, <stage>_out..., <terminal>_out, class
struct LabeledDataset {
  std::vector<std::string> sensor_names;
  std::vector<std::string> stage_names;  // non-terminal stages, evaluation order
  std::string final_name;                // terminal stage
  std::vector<DataRow> rows;

  std::vector<std::string> columns() const;
  /// Sensor channels followed by the non-terminal `<stage>_out` columns.
  std::vector<std::string> feature_names() const;
  std::string final_column() const { return final_name + "_out"; }

  /// Values of a numeric column by name (time, a feature, or the final column).
  /// Throws LookupError for an unknown column.
  std::vector<double> column(std::string_view name) const;
  std::vector<double> finals() const;

  std::size_t size() const noexcept { return rows.size(); }
  bool empty() const noexcept { return rows.empty(); }
};

/// Throws ValidationError when the schedule does not fit the architecture.
LabeledDataset run_simulation(const EthicsArchitecture& arch, const SimulationSchedule& sched);

/// Labels each row "0", "1" or "2" via classify_takeover.
LabeledDataset label_takeover(LabeledDataset ds);

inline constexpr std::string_view kStraightAheadLabel = "straight_ahead";
inline constexpr std::string_view kSwerveLabel = "swerve";

struct DilemmaLabeling {
  LabeledDataset dataset;
  double median = 0.0;
};

/// Splits at the median final output: below is straight ahead, at or above is
/// swerve. Throws Error on an empty dataset.
DilemmaLabeling label_dilemma(LabeledDataset ds);

/// UTF-8, LF, '.' decimals, 6 significant digits. Returns the data row count.
std::size_t export_csv(const LabeledDataset& ds, std::ostream& out);
/// Throws IoError when the file cannot be written.
std::size_t export_csv(const LabeledDataset& ds, const std::filesystem::path& path);

/// Throws ParseError carrying the 1-based line number.
LabeledDataset read_csv(std::istream& in);
/// Throws IoError when the file cannot be read.
LabeledDataset read_csv(const std::filesystem::path& path);

/// time plus every numeric stream, with per-column display scale factors
/// (e.g. {"speed", 0.1}) applied. Inference data is never scaled.
std::size_t export_plot_data(const LabeledDataset& ds, std::ostream& out,
                             const std::map<std::string, double, std::less<>>& scale = {});

}  // namespace autometric
