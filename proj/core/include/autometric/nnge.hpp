#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "autometric/simulation.hpp"

namespace autometric {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const noexcept { return hi - lo; }
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Generalized exemplar: one closed interval per feature. A point exemplar
/// has lo == hi on every feature.
struct Hyperrectangle {
  std::vector<Interval> intervals;
  std::string label;
  std::size_t covered = 0;

  bool contains(std::span<const double> x) const noexcept;
};

struct Example {
  std::vector<double> features;
  std::string label;
};

/// Range-normalized Euclidean distance from `x` to the nearest face of `h`;
/// zero iff `x` lies inside. Throws ConfigError on a zero-width range.
double exemplar_distance(std::span<const double> x, const Hyperrectangle& h, std::span<const Interval> ranges);

class NngeModel {
 public:
  NngeModel(std::vector<std::string> features, std::vector<Interval> ranges, std::vector<Hyperrectangle> exemplars);

  const std::vector<std::string>& features() const noexcept { return features_; }
  /// Observed [min, max] of each feature over the training data.
  const std::vector<Interval>& ranges() const noexcept { return ranges_; }
  /// Insertion order; classify() breaks distance ties toward the front.
  const std::vector<Hyperrectangle>& exemplars() const noexcept { return exemplars_; }
  std::vector<std::string> classes() const;

  /// Label of the nearest exemplar. Throws Error on an empty model.
  const std::string& classify(std::span<const double> x) const;

 private:
  std::vector<std::string> features_;
  std::vector<Interval> ranges_;
  std::vector<Hyperrectangle> exemplars_;
};

/// Nearest neighbour with generalization, one pass in dataset order.
///
/// Each example either widens its nearest same-class exemplar (when the
/// widened box would not swallow an already seen example of another class) or
/// becomes a point exemplar. Any other-class box that contains the example is
/// split along the single axis that loses the least normalized volume. After
/// training no box contains a training example of another class, so every
/// training example is classified correctly.
///
/// Throws TrainingError for an empty dataset, ragged feature vectors, or two
/// identical feature vectors with different labels.
NngeModel train(std::span<const Example> examples, std::vector<std::string> features);

/// Examples over the named dataset columns (see LabeledDataset::column),
/// labelled by the row label. Throws LookupError for unknown features.
std::vector<Example> examples_from(const LabeledDataset& ds, const std::vector<std::string>& features);

/// Fraction of `examples` the model labels correctly.
double accuracy(const NngeModel& model, std::span<const Example> examples);

struct IntervalRule {
  std::vector<std::pair<std::string, Interval>> conditions;
  std::string label;
  std::size_t covered = 0;
};

inline constexpr std::size_t kDefaultMinCovered = 2;

/// One rule per exemplar covering at least `min_covered` training examples,
/// most covered first (stable for ties).
std::vector<IntervalRule> extract_rules(const NngeModel& model, std::size_t min_covered = kDefaultMinCovered);

/// Display-only multipliers per feature, e.g. {"pedestrian", 10} to print
/// sensor units as years. A scaled feature prints as `<feature>_x<factor>`.
using DisplayScale = std::map<std::string, double, std::less<>>;

/// `IF (lo <= feature <= hi) AND ... THEN class <label>  [covered n]`, with
/// degenerate intervals written as `feature = v`.
std::string render_rule(const IntervalRule& rule, const DisplayScale& scale = {});
std::string render_rules_text(const std::vector<IntervalRule>& rules, const DisplayScale& scale = {});
/// JSON list of {"intervals": {feature: [lo, hi]}, "class": label, "covered": n}.
std::string render_rules_json(const std::vector<IntervalRule>& rules);

struct KFoldResult {
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0.0;
};

/// Seeded shuffle, k contiguous folds (the first n % k folds one larger),
/// train on k - 1 and test on the held-out fold. Throws Error when k < 2 or
/// the dataset has fewer than k examples.
KFoldResult kfold_eval(std::span<const Example> examples, const std::vector<std::string>& features, std::size_t k,
                       std::uint64_t seed);

}  // namespace autometric
