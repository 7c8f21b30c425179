#include "autometric/nnge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "autometric/error.hpp"

namespace autometric {

bool Hyperrectangle::contains(std::span<const double> x) const noexcept {
  if (x.size() != intervals.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!intervals[i].contains(x[i])) return false;
  return true;
}

double exemplar_distance(std::span<const double> x, const Hyperrectangle& h, std::span<const Interval> ranges) {
  if (x.size() != h.intervals.size() || x.size() != ranges.size())
    throw Error(fmt::format("feature count mismatch: point {}, exemplar {}, ranges {}", x.size(), h.intervals.size(),
                            ranges.size()));
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double width = ranges[i].width();
    if (!(width > 0.0)) throw ConfigError(fmt::format("feature {} has a zero-width range; distances are undefined", i));
    const auto& iv = h.intervals[i];
    double d = 0.0;
    if (x[i] < iv.lo) d = iv.lo - x[i];
    else if (x[i] > iv.hi) d = x[i] - iv.hi;
    d /= width;
    sum += d * d;
  }
  return std::sqrt(sum);
}

NngeModel::NngeModel(std::vector<std::string> features, std::vector<Interval> ranges,
                     std::vector<Hyperrectangle> exemplars)
    : features_(std::move(features)), ranges_(std::move(ranges)), exemplars_(std::move(exemplars)) {
  if (ranges_.size() != features_.size())
    throw Error(fmt::format("{} ranges for {} features", ranges_.size(), features_.size()));
  for (const auto& h : exemplars_)
    if (h.intervals.size() != features_.size())
      throw Error(fmt::format("exemplar has {} intervals for {} features", h.intervals.size(), features_.size()));
}

std::vector<std::string> NngeModel::classes() const {
  std::set<std::string> labels;
  for (const auto& h : exemplars_) labels.insert(h.label);
  return {labels.begin(), labels.end()};
}

const std::string& NngeModel::classify(std::span<const double> x) const {
  if (exemplars_.empty()) throw Error("cannot classify with an empty model");
  if (exemplars_.size() == 1) return exemplars_.front().label;
  std::size_t best = 0;
  double best_d = exemplar_distance(x, exemplars_[0], ranges_);
  for (std::size_t i = 1; i < exemplars_.size() && best_d > 0.0; ++i) {
    const double d = exemplar_distance(x, exemplars_[i], ranges_);
    if (d < best_d) {
      best = i;
      best_d = d;
    }
  }
  return exemplars_[best].label;
}

namespace {

struct Box {
  Hyperrectangle rect;
  std::vector<std::size_t> members;
};

Box point_box(const Example& e, std::size_t index) {
  Box b;
  for (double v : e.features) b.rect.intervals.push_back({v, v});
  b.rect.label = e.label;
  b.rect.covered = 1;
  b.members.push_back(index);
  return b;
}

void check_examples(std::span<const Example> examples) {
  if (examples.empty()) throw TrainingError("cannot train on an empty dataset");
  const std::size_t dims = examples.front().features.size();
  for (std::size_t i = 0; i < examples.size(); ++i)
    if (examples[i].features.size() != dims)
      throw TrainingError(fmt::format("example {} has {} features, expected {}", i + 1, examples[i].features.size(), dims));

  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return examples[a].features < examples[b].features; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto& a = examples[order[i - 1]];
    const auto& b = examples[order[i]];
    if (a.features == b.features && a.label != b.label) {
      const auto [first, second] = std::minmax(order[i - 1], order[i]);
      throw TrainingError(fmt::format("examples {} and {} have identical features but labels '{}' and '{}'", first + 1,
                                      second + 1, examples[first].label, examples[second].label));
    }
  }
}

double normalized_volume(const std::vector<Interval>& intervals, std::span<const Interval> ranges) {
  double v = 1.0;
  for (std::size_t i = 0; i < intervals.size(); ++i) v *= intervals[i].width() / ranges[i].width();
  return v;
}

// Replaces boxes[b], which contains `x`, with pieces that exclude it: the
// members below and above x along one axis each keep the original extent on
// every other axis. When every axis has a member level with x, the box falls
// back to its members as point exemplars.
void split_box(std::vector<Box>& boxes, std::size_t b, std::span<const double> x, std::span<const Example> examples,
               std::span<const Interval> ranges) {
  const Box box = boxes[b];
  const std::size_t dims = x.size();
  const double volume = normalized_volume(box.rect.intervals, ranges);

  std::optional<std::size_t> best_axis;
  double best_loss = 0.0;
  for (std::size_t axis = 0; axis < dims; ++axis) {
    double below_hi = -std::numeric_limits<double>::infinity();
    double above_lo = std::numeric_limits<double>::infinity();
    bool feasible = true;
    for (auto m : box.members) {
      const double v = examples[m].features[axis];
      if (v == x[axis]) {
        feasible = false;
        break;
      }
      if (v < x[axis]) below_hi = std::max(below_hi, v);
      else above_lo = std::min(above_lo, v);
    }
    if (!feasible) continue;
    const double full = box.rect.intervals[axis].width();
    double kept = 0.0;
    if (std::isfinite(below_hi)) kept += below_hi - box.rect.intervals[axis].lo;
    if (std::isfinite(above_lo)) kept += box.rect.intervals[axis].hi - above_lo;
    const double loss = full > 0.0 ? volume * (full - kept) / full : 0.0;
    if (!best_axis || loss < best_loss) {
      best_axis = axis;
      best_loss = loss;
    }
  }

  std::vector<Box> pieces;
  if (best_axis) {
    const auto axis = *best_axis;
    Box below{box.rect, {}};
    Box above{box.rect, {}};
    below.rect.intervals[axis].hi = -std::numeric_limits<double>::infinity();
    above.rect.intervals[axis].lo = std::numeric_limits<double>::infinity();
    for (auto m : box.members) {
      const double v = examples[m].features[axis];
      Box& side = v < x[axis] ? below : above;
      side.members.push_back(m);
      if (&side == &below) below.rect.intervals[axis].hi = std::max(below.rect.intervals[axis].hi, v);
      else above.rect.intervals[axis].lo = std::min(above.rect.intervals[axis].lo, v);
    }
    for (Box* piece : {&below, &above})
      if (!piece->members.empty()) {
        piece->rect.covered = piece->members.size();
        pieces.push_back(std::move(*piece));
      }
  } else {
    for (auto m : box.members) pieces.push_back(point_box(examples[m], m));
  }

  boxes.erase(boxes.begin() + static_cast<std::ptrdiff_t>(b));
  boxes.insert(boxes.begin() + static_cast<std::ptrdiff_t>(b), pieces.begin(), pieces.end());
}

}  // namespace

NngeModel train(std::span<const Example> examples, std::vector<std::string> features) {
  check_examples(examples);
  const std::size_t dims = examples.front().features.size();
  if (features.size() != dims)
    throw TrainingError(fmt::format("{} feature names for {}-dimensional examples", features.size(), dims));

  std::vector<Interval> ranges(dims, {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
  for (const auto& e : examples)
    for (std::size_t i = 0; i < dims; ++i) {
      ranges[i].lo = std::min(ranges[i].lo, e.features[i]);
      ranges[i].hi = std::max(ranges[i].hi, e.features[i]);
    }

  std::vector<Box> boxes;
  std::vector<std::size_t> seen;
  seen.reserve(examples.size());

  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& e = examples[i];
    const std::span<const double> x = e.features;

    if (boxes.empty()) {
      boxes.push_back(point_box(e, i));
    } else {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t b = 0; b < boxes.size(); ++b) {
        const double d = exemplar_distance(x, boxes[b].rect, ranges);
        if (d < best_d) {
          best = b;
          best_d = d;
        }
      }
      Box& nearest = boxes[best];
      if (nearest.rect.label != e.label) {
        boxes.push_back(point_box(e, i));
      } else if (best_d == 0.0) {
        nearest.members.push_back(i);
        nearest.rect.covered = nearest.members.size();
      } else {
        Hyperrectangle widened = nearest.rect;
        for (std::size_t d = 0; d < dims; ++d) {
          widened.intervals[d].lo = std::min(widened.intervals[d].lo, x[d]);
          widened.intervals[d].hi = std::max(widened.intervals[d].hi, x[d]);
        }
        const bool swallows_other = std::any_of(seen.begin(), seen.end(), [&](std::size_t j) {
          return examples[j].label != e.label && widened.contains(examples[j].features);
        });
        if (swallows_other) {
          boxes.push_back(point_box(e, i));
        } else {
          nearest.rect = std::move(widened);
          nearest.members.push_back(i);
          nearest.rect.covered = nearest.members.size();
        }
      }
    }

    // Back to front so inserted pieces never shift a box still to be visited.
    for (std::size_t b = boxes.size(); b-- > 0;)
      if (boxes[b].rect.label != e.label && boxes[b].rect.contains(x)) split_box(boxes, b, x, examples, ranges);

    seen.push_back(i);
  }

  std::vector<Hyperrectangle> exemplars;
  exemplars.reserve(boxes.size());
  for (auto& b : boxes) exemplars.push_back(std::move(b.rect));
  return {std::move(features), std::move(ranges), std::move(exemplars)};
}

std::vector<Example> examples_from(const LabeledDataset& ds, const std::vector<std::string>& features) {
  std::vector<std::vector<double>> cols;
  cols.reserve(features.size());
  for (const auto& f : features) cols.push_back(ds.column(f));
  std::vector<Example> out(ds.size());
  for (std::size_t r = 0; r < ds.size(); ++r) {
    out[r].label = ds.rows[r].label;
    for (const auto& c : cols) out[r].features.push_back(c[r]);
  }
  return out;
}

double accuracy(const NngeModel& model, std::span<const Example> examples) {
  if (examples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& e : examples)
    if (model.classify(e.features) == e.label) ++correct;
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

std::vector<IntervalRule> extract_rules(const NngeModel& model, std::size_t min_covered) {
  std::vector<IntervalRule> rules;
  for (const auto& h : model.exemplars()) {
    if (h.covered < min_covered) continue;
    IntervalRule rule;
    for (std::size_t i = 0; i < h.intervals.size(); ++i) rule.conditions.emplace_back(model.features()[i], h.intervals[i]);
    rule.label = h.label;
    rule.covered = h.covered;
    rules.push_back(std::move(rule));
  }
  std::stable_sort(rules.begin(), rules.end(), [](const IntervalRule& a, const IntervalRule& b) { return a.covered > b.covered; });
  return rules;
}

std::string render_rule(const IntervalRule& rule, const DisplayScale& scale) {
  std::string out = "IF ";
  for (std::size_t i = 0; i < rule.conditions.size(); ++i) {
    const auto& [feature, iv] = rule.conditions[i];
    double factor = 1.0;
    std::string name = feature;
    if (const auto it = scale.find(feature); it != scale.end()) {
      factor = it->second;
      name = fmt::format("{}_x{:g}", feature, factor);
    }
    if (i > 0) out += " AND ";
    if (iv.lo == iv.hi) out += fmt::format("({} = {:.4g})", name, iv.lo * factor);
    else out += fmt::format("({:.4g} <= {} <= {:.4g})", iv.lo * factor, name, iv.hi * factor);
  }
  out += fmt::format(" THEN class {}  [covered {}]", rule.label, rule.covered);
  return out;
}

std::string render_rules_text(const std::vector<IntervalRule>& rules, const DisplayScale& scale) {
  std::string out;
  for (const auto& r : rules) {
    out += render_rule(r, scale);
    out += '\n';
  }
  return out;
}

std::string render_rules_json(const std::vector<IntervalRule>& rules) {
  auto list = nlohmann::ordered_json::array();
  for (const auto& r : rules) {
    nlohmann::ordered_json intervals = nlohmann::ordered_json::object();
    for (const auto& [feature, iv] : r.conditions) intervals[feature] = {iv.lo, iv.hi};
    list.push_back({{"intervals", intervals}, {"class", r.label}, {"covered", r.covered}});
  }
  return list.dump(2);
}

namespace {

// Uniform draw in [0, n) without the implementation-defined behaviour of
// std::uniform_int_distribution, so folds match across standard libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  std::uint64_t r = 0;
  do r = rng();
  while (r < threshold);
  return r % n;
}

}  // namespace

KFoldResult kfold_eval(std::span<const Example> examples, const std::vector<std::string>& features, std::size_t k,
                       std::uint64_t seed) {
  if (k < 2) throw Error(fmt::format("k-fold needs k >= 2, got {}", k));
  if (examples.size() < k) throw Error(fmt::format("k-fold with k = {} needs at least {} examples, got {}", k, k, examples.size()));
  check_examples(examples);

  std::vector<std::size_t> perm(examples.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[bounded(rng, i + 1)]);

  KFoldResult result;
  const std::size_t base = examples.size() / k;
  const std::size_t extra = examples.size() % k;
  std::size_t start = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    std::vector<Example> train_set;
    std::vector<Example> test_set;
    for (std::size_t i = 0; i < perm.size(); ++i)
      (i >= start && i < start + size ? test_set : train_set).push_back(examples[perm[i]]);
    const auto model = train(train_set, features);
    result.fold_accuracy.push_back(accuracy(model, test_set));
    start += size;
  }
  result.mean_accuracy = std::accumulate(result.fold_accuracy.begin(), result.fold_accuracy.end(), 0.0) /
                         static_cast<double>(k);
  return result;
}

}  // namespace autometric
