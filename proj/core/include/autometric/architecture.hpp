#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "autometric/fuzzy_system.hpp"

namespace autometric {

/// Where a stage input gets its value from.
struct Source {
  enum class Kind { sensor, stage };

  Kind kind = Kind::sensor;
  std::string name;

  static Source sensor(std::string name) { return {Kind::sensor, std::move(name)}; }
  static Source stage(std::string name) { return {Kind::stage, std::move(name)}; }

  friend bool operator==(const Source&, const Source&) = default;
};

/// One fuzzy system in the cascade; its name is `system.name`. `wiring` maps
/// each input variable of the system to its source.
struct Stage {
  FuzzySystem system;
  std::map<std::string, Source, std::less<>> wiring;

  const std::string& name() const noexcept { return system.name; }

  friend bool operator==(const Stage&, const Stage&) = default;
};

struct StageOutput {
  std::string stage;
  double value = 0.0;
  bool no_firing = false;
};

struct EvaluationTrace {
  ValueMap sensors;
  std::vector<StageOutput> stages;  // topological order, terminal stage last
  double final = 0.0;

  /// Throws LookupError for an unknown stage.
  double stage(std::string_view name) const;
};

/// Problems with the sensor list, the stages or their wiring; empty when the
/// cascade is total, acyclic and has exactly one terminal stage.
std::vector<std::string> validate_architecture(const std::vector<std::string>& sensors,
                                               const std::vector<Stage>& stages);

/// Directed cascade of fuzzy systems from sensor channels to one final output.
/// Immutable once built; evaluate() is safe to call concurrently.
class EthicsArchitecture {
 public:
  /// Throws ValidationError with every problem found.
  EthicsArchitecture(std::string name, std::vector<std::string> sensors, std::vector<Stage> stages);

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& sensors() const noexcept { return sensors_; }
  /// Stages in evaluation order; the last one is terminal.
  const std::vector<Stage>& stages() const noexcept { return stages_; }
  const Stage& terminal() const noexcept { return stages_.back(); }

  /// Returns a copy with every stage's defuzzification grid set to `points`.
  EthicsArchitecture with_grid_points(std::size_t points) const;

  EvaluationTrace evaluate(const ValueMap& sensors) const;
  /// Sensor values in `sensors()` order.
  EvaluationTrace evaluate(std::span<const double> sensors) const;

 private:
  struct Feed {
    Source::Kind kind;
    std::size_t index;
  };

  std::string name_;
  std::vector<std::string> sensors_;
  std::vector<Stage> stages_;
  std::vector<InferenceEngine> engines_;
  std::vector<std::vector<Feed>> feeds_;  // per stage, per system input
};

/// Right/wrong and good/bad reasoners over distance, lane and speed feeding
/// the virtuous meta-ethics controller (stage names rightwrong, goodbad, vmec).
EthicsArchitecture build_takeover_architecture(std::size_t grid_points = kDefaultGridPoints);

/// Swerve right/wrong over straight/swerve death risk, avoid good/bad over
/// pedestrian age, combined by the dilemma controller (stage names
/// rightwrong, goodbad, dilemma).
EthicsArchitecture build_dilemma_architecture(std::size_t grid_points = kDefaultGridPoints);

enum class VirtuousClass { class0, class1, class2 };

/// class0 below 5, class1 in [5, 6), class2 from 6 up.
VirtuousClass classify_takeover(double vmec_out) noexcept;

int class_index(VirtuousClass cls) noexcept;
/// "0", "1" or "2", the label used in datasets.
std::string class_label(VirtuousClass cls);

enum class ControlState { human, iav };

std::string_view to_string(ControlState state) noexcept;

/// Takeover when a human-driven vehicle reaches class2, hand back when the
/// vehicle holds control and the state drops to class0. class1 never moves.
ControlState control_transition(ControlState state, VirtuousClass cls) noexcept;

}  // namespace autometric
