#include "autometric/fuzzy_system.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "autometric/error.hpp"

namespace autometric {

const Term* FuzzyVariable::find(std::string_view label) const noexcept {
  auto it = std::find_if(terms.begin(), terms.end(), [&](const Term& t) { return t.label == label; });
  return it == terms.end() ? nullptr : &*it;
}

double FuzzyVariable::clamp(double x) const noexcept { return std::clamp(x, lo, hi); }

const FuzzyVariable* FuzzySystem::find_input(std::string_view variable) const noexcept {
  auto it = std::find_if(inputs.begin(), inputs.end(), [&](const FuzzyVariable& v) { return v.name == variable; });
  return it == inputs.end() ? nullptr : &*it;
}

Degrees fuzzify(const FuzzyVariable& var, double x) {
  Degrees out;
  const double clamped = var.clamp(x);
  for (const auto& term : var.terms) out.emplace(term.label, term.mf(clamped));
  return out;
}

double fire_rule(const Rule& rule, const FuzzifiedInputs& fuzzified) {
  double strength = 1.0;
  for (const auto& clause : rule.antecedents) {
    auto var = fuzzified.find(clause.variable);
    if (var == fuzzified.end())
      throw LookupError(fmt::format("rule '{}': no degrees for variable '{}'", rule.name, clause.variable));
    auto degree = var->second.find(clause.label);
    if (degree == var->second.end())
      throw LookupError(
          fmt::format("rule '{}': variable '{}' has no term '{}'", rule.name, clause.variable, clause.label));
    strength = std::min(strength, degree->second);
  }
  return strength;
}

std::optional<double> aggregate_and_defuzz(const FuzzySystem& system, std::span<const double> strengths) {
  return InferenceEngine(system).defuzzify(strengths);
}

Crisp infer(const FuzzySystem& system, const ValueMap& inputs) { return InferenceEngine(system).infer(inputs); }

namespace {

void check_variable(const FuzzyVariable& var, std::string_view role, std::vector<std::string>& out) {
  const std::string where = fmt::format("{} variable '{}'", role, var.name);
  if (var.name.empty()) out.push_back(fmt::format("{} variable has an empty name", role));
  if (!std::isfinite(var.lo) || !std::isfinite(var.hi) || !(var.lo < var.hi))
    out.push_back(fmt::format("{}: range [{}, {}] must satisfy lo < hi", where, var.lo, var.hi));
  if (var.terms.empty()) out.push_back(fmt::format("{}: needs at least one membership function", where));
  std::set<std::string_view> seen;
  for (const auto& term : var.terms) {
    if (term.label.empty()) out.push_back(fmt::format("{}: term with empty label", where));
    if (!seen.insert(term.label).second) out.push_back(fmt::format("{}: duplicate term '{}'", where, term.label));
    for (const auto& v : term.mf.violations()) out.push_back(fmt::format("{} term '{}': {}", where, term.label, v));
  }
}

}  // namespace

std::vector<std::string> validate_system(const FuzzySystem& system) {
  std::vector<std::string> out;
  std::set<std::string_view> names;
  for (const auto& input : system.inputs) {
    check_variable(input, "input", out);
    if (!names.insert(input.name).second) out.push_back(fmt::format("duplicate variable '{}'", input.name));
  }
  check_variable(system.output, "output", out);
  if (!names.insert(system.output.name).second)
    out.push_back(fmt::format("output variable '{}' shadows an input", system.output.name));
  if (system.inputs.empty()) out.push_back("system has no inputs");
  if (system.grid_points < kMinGridPoints)
    out.push_back(fmt::format("grid_points {} is below the minimum of {}", system.grid_points, kMinGridPoints));

  for (std::size_t i = 0; i < system.rules.size(); ++i) {
    const auto& rule = system.rules[i];
    const std::string where = rule.name.empty() ? fmt::format("rule #{}", i + 1) : fmt::format("rule '{}'", rule.name);
    if (rule.antecedents.empty()) out.push_back(fmt::format("{}: no antecedents", where));
    for (const auto& clause : rule.antecedents) {
      const auto* var = system.find_input(clause.variable);
      if (var == nullptr)
        out.push_back(fmt::format("{}: unknown input variable '{}'", where, clause.variable));
      else if (var->find(clause.label) == nullptr)
        out.push_back(fmt::format("{}: variable '{}' has no term '{}'", where, clause.variable, clause.label));
    }
    if (rule.consequent.variable != system.output.name)
      out.push_back(fmt::format("{}: consequent variable '{}' is not the output '{}'", where,
                                rule.consequent.variable, system.output.name));
    else if (system.output.find(rule.consequent.label) == nullptr)
      out.push_back(fmt::format("{}: output '{}' has no term '{}'", where, system.output.name, rule.consequent.label));
  }
  return out;
}

InferenceEngine::InferenceEngine(FuzzySystem system) : system_(std::move(system)) {
  if (auto v = validate_system(system_); !v.empty()) {
    for (auto& line : v) line = fmt::format("system '{}': {}", system_.name, line);
    throw ValidationError(std::move(v));
  }

  auto term_index = [](const FuzzyVariable& var, std::string_view label) {
    return static_cast<std::size_t>(var.find(label) - var.terms.data());
  };
  for (const auto& rule : system_.rules) {
    CompiledRule compiled;
    for (const auto& clause : rule.antecedents) {
      const auto* var = system_.find_input(clause.variable);
      compiled.antecedents.emplace_back(static_cast<std::size_t>(var - system_.inputs.data()),
                                        term_index(*var, clause.label));
    }
    compiled.consequent = term_index(system_.output, rule.consequent.label);
    rules_.push_back(std::move(compiled));
  }

  const auto& out = system_.output;
  const std::size_t n = system_.grid_points;
  grid_.resize(n);
  const double step = (out.hi - out.lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) grid_[i] = out.lo + step * static_cast<double>(i);
  grid_.back() = out.hi;

  // Trapezoidal quadrature weights; the plain sum is biased by half a cell at
  // each endpoint where the aggregate is nonzero.
  weights_.assign(n, 1.0);
  weights_.front() = weights_.back() = 0.5;

  for (const auto& term : out.terms) {
    std::vector<double> curve(n);
    std::transform(grid_.begin(), grid_.end(), curve.begin(), [&](double x) { return term.mf(x); });
    consequent_curves_.push_back(std::move(curve));
  }
}

std::vector<double> InferenceEngine::strengths(std::span<const double> inputs) const {
  if (inputs.size() != system_.inputs.size())
    throw Error(fmt::format("system '{}' expects {} inputs, got {}", system_.name, system_.inputs.size(), inputs.size()));
  std::vector<std::vector<double>> degrees(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& var = system_.inputs[i];
    const double x = var.clamp(inputs[i]);
    degrees[i].reserve(var.terms.size());
    for (const auto& term : var.terms) degrees[i].push_back(term.mf(x));
  }
  std::vector<double> out;
  out.reserve(rules_.size());
  for (const auto& rule : rules_) {
    double s = 1.0;
    for (auto [var, term] : rule.antecedents) s = std::min(s, degrees[var][term]);
    out.push_back(s);
  }
  return out;
}

std::optional<double> InferenceEngine::defuzzify(std::span<const double> strengths) const {
  if (strengths.size() != rules_.size())
    throw Error(fmt::format("system '{}' has {} rules, got {} strengths", system_.name, rules_.size(), strengths.size()));
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    double mu = 0.0;
    for (std::size_t r = 0; r < rules_.size(); ++r)
      mu = std::max(mu, std::min(strengths[r], consequent_curves_[rules_[r].consequent][i]));
    num += weights_[i] * grid_[i] * mu;
    den += weights_[i] * mu;
  }
  if (!(den > 0.0)) return std::nullopt;
  return std::clamp(num / den, system_.output.lo, system_.output.hi);
}

Crisp InferenceEngine::infer(std::span<const double> inputs) const {
  if (auto value = defuzzify(strengths(inputs))) return {*value, false};
  return {0.5 * (system_.output.lo + system_.output.hi), true};
}

Crisp InferenceEngine::infer(const ValueMap& inputs) const {
  std::vector<double> ordered;
  ordered.reserve(system_.inputs.size());
  for (const auto& var : system_.inputs) {
    auto it = inputs.find(var.name);
    if (it == inputs.end()) throw LookupError(fmt::format("system '{}': missing input '{}'", system_.name, var.name));
    ordered.push_back(it->second);
  }
  return infer(ordered);
}

}  // namespace autometric
