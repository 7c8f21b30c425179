#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "autometric/simulation.hpp"

namespace autometric {

/// Throws Error on empty input.
double mean(std::span<const double> values);
/// Mean of the two middle values for an even count. Throws Error on empty input.
double median(std::span<const double> values);

/// Sum of squared differences. Throws Error on a length mismatch.
double stream_sq_distance(std::span<const double> a, std::span<const double> b);

struct RegressionResult {
  double intercept = 0.0;
  std::vector<std::pair<std::string, double>> coefficients;
  double r_squared = 0.0;

  /// Throws LookupError for an unknown regressor.
  double coefficient(std::string_view name) const;
};

/// Ordinary least squares with an intercept, solved by column-pivoted
/// Householder QR. `columns[j]` holds regressor `names[j]`.
///
/// A constant target gives R^2 = 0, zero coefficients and the mean as
/// intercept. Throws Error when there are not more rows than regressors, and
/// Error naming the dependent columns when the design is rank deficient.
RegressionResult ols_fit(const std::vector<std::string>& names, const std::vector<std::vector<double>>& columns,
                         std::span<const double> y);

struct ClassSummary {
  std::string label;
  std::size_t count = 0;
  double mean = 0.0;
};

struct SummaryReport {
  std::size_t size = 0;
  std::vector<ClassSummary> classes;  // sorted by label
  double mean = 0.0;
  double median = 0.0;

  const ClassSummary* find(std::string_view label) const noexcept;
};

/// Throws Error on an empty dataset.
SummaryReport summarize(const LabeledDataset& ds);

std::string render_text(const SummaryReport& report);
std::string render_text(const RegressionResult& result);
std::string render_json(const SummaryReport& report);
std::string render_json(const RegressionResult& result);

}  // namespace autometric
