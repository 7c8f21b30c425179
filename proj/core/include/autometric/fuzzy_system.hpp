#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "autometric/membership.hpp"

namespace autometric {

inline constexpr std::size_t kDefaultGridPoints = 1001;
inline constexpr std::size_t kMinGridPoints = 101;

/// Crisp values keyed by variable or channel name.
using ValueMap = std::map<std::string, double, std::less<>>;

struct Term {
  std::string label;
  MembershipFunction mf;

  friend bool operator==(const Term&, const Term&) = default;
};

struct FuzzyVariable {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<Term> terms;

  const Term* find(std::string_view label) const noexcept;
  double clamp(double x) const noexcept;

  friend bool operator==(const FuzzyVariable&, const FuzzyVariable&) = default;
};

/// `variable is label`
struct Clause {
  std::string variable;
  std::string label;

  friend bool operator==(const Clause&, const Clause&) = default;
};

/// Conjunctive rule: IF a1 AND a2 ... THEN consequent.
struct Rule {
  std::string name;
  std::vector<Clause> antecedents;
  Clause consequent;

  friend bool operator==(const Rule&, const Rule&) = default;
};

/// A single Mamdani system: min conjunction, clip implication, max
/// aggregation, centroid defuzzification over `grid_points` uniform samples
/// of the output range.
struct FuzzySystem {
  std::string name;
  std::vector<FuzzyVariable> inputs;
  FuzzyVariable output;
  std::vector<Rule> rules;
  std::size_t grid_points = kDefaultGridPoints;

  const FuzzyVariable* find_input(std::string_view variable) const noexcept;

  friend bool operator==(const FuzzySystem&, const FuzzySystem&) = default;
};

/// Result of a full inference. `no_firing` marks the fallback value (output
/// range midpoint) used when no rule had positive strength.
struct Crisp {
  double value = 0.0;
  bool no_firing = false;
};

using Degrees = std::map<std::string, double, std::less<>>;
using FuzzifiedInputs = std::map<std::string, Degrees, std::less<>>;

/// Degree of every term at `x`, after clamping `x` into the variable range.
Degrees fuzzify(const FuzzyVariable& var, double x);

/// Minimum over the antecedent degrees. Throws LookupError when an antecedent
/// is missing from `fuzzified`.
double fire_rule(const Rule& rule, const FuzzifiedInputs& fuzzified);

/// Centroid of the max-aggregated clipped consequents; std::nullopt when the
/// aggregate is identically zero. `strengths[i]` belongs to `system.rules[i]`.
std::optional<double> aggregate_and_defuzz(const FuzzySystem& system, std::span<const double> strengths);

/// fuzzify -> fire_rule -> aggregate_and_defuzz, with the midpoint fallback.
Crisp infer(const FuzzySystem& system, const ValueMap& inputs);

/// Every broken invariant or dangling rule reference; empty when valid.
std::vector<std::string> validate_system(const FuzzySystem& system);

/// A validated system with rule references resolved to indices and the
/// consequent curves pre-sampled on the defuzzification grid.
class InferenceEngine {
 public:
  /// Throws ValidationError when validate_system reports anything.
  explicit InferenceEngine(FuzzySystem system);

  const FuzzySystem& system() const noexcept { return system_; }

  /// Inputs in `system().inputs` order.
  Crisp infer(std::span<const double> inputs) const;
  Crisp infer(const ValueMap& inputs) const;

  /// Rule strengths for inputs in `system().inputs` order.
  std::vector<double> strengths(std::span<const double> inputs) const;

  std::optional<double> defuzzify(std::span<const double> strengths) const;

  std::span<const double> grid() const noexcept { return grid_; }

 private:
  struct CompiledRule {
    std::vector<std::pair<std::size_t, std::size_t>> antecedents;  // (input, term)
    std::size_t consequent = 0;                                      // output term
  };

  FuzzySystem system_;
  std::vector<CompiledRule> rules_;
  std::vector<double> grid_;
  std::vector<double> weights_;
  std::vector<std::vector<double>> consequent_curves_;
};

}  // namespace autometric
