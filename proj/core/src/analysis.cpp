#include "autometric/analysis.hpp"

#include <algorithm>
#include <map>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "autometric/error.hpp"

namespace autometric {

double mean(std::span<const double> values) {
  if (values.empty()) throw Error("mean of an empty sequence");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double median(std::span<const double> values) {
  if (values.empty()) throw Error("median of an empty sequence");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  return n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

double stream_sq_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(fmt::format("stream lengths differ: {} vs {}", a.size(), b.size()));
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double RegressionResult::coefficient(std::string_view name) const {
  for (const auto& [n, c] : coefficients)
    if (n == name) return c;
  throw LookupError(fmt::format("regression has no regressor '{}'", name));
}

RegressionResult ols_fit(const std::vector<std::string>& names, const std::vector<std::vector<double>>& columns,
                         std::span<const double> y) {
  const std::size_t k = columns.size();
  const std::size_t n = y.size();
  if (names.size() != k) throw Error(fmt::format("{} regressor names for {} columns", names.size(), k));
  for (std::size_t j = 0; j < k; ++j)
    if (columns[j].size() != n)
      throw Error(fmt::format("regressor '{}' has {} rows, target has {}", names[j], columns[j].size(), n));
  if (n <= k) throw Error(fmt::format("regression over {} regressors needs more than {} rows, got {}", k, k, n));

  RegressionResult result;
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  if (*lo == *hi) {
    result.intercept = *lo;
    for (const auto& name : names) result.coefficients.emplace_back(name, 0.0);
    result.r_squared = 0.0;
    return result;
  }

  Eigen::MatrixXd X(n, k + 1);
  Eigen::VectorXd Y(n);
  for (std::size_t i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    for (std::size_t j = 0; j < k; ++j) X(i, j + 1) = columns[j][i];
    Y(i) = y[i];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (static_cast<std::size_t>(qr.rank()) < k + 1) {
    std::vector<std::string> dependent;
    const auto& perm = qr.colsPermutation().indices();
    for (auto p = qr.rank(); p < static_cast<Eigen::Index>(k + 1); ++p) {
      const auto col = static_cast<std::size_t>(perm(p));
      dependent.push_back(col == 0 ? "intercept" : names[col - 1]);
    }
    throw Error(fmt::format("design matrix is rank deficient; dependent columns: {}", fmt::join(dependent, ", ")));
  }
  const Eigen::VectorXd beta = qr.solve(Y);
  const Eigen::VectorXd residual = Y - X * beta;

  const double y_mean = Y.mean();
  const double ss_res = residual.squaredNorm();
  const double ss_tot = (Y.array() - y_mean).square().sum();

  result.intercept = beta(0);
  for (std::size_t j = 0; j < k; ++j) result.coefficients.emplace_back(names[j], beta(static_cast<Eigen::Index>(j + 1)));
  result.r_squared = std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
  return result;
}

const ClassSummary* SummaryReport::find(std::string_view label) const noexcept {
  auto it = std::find_if(classes.begin(), classes.end(), [&](const ClassSummary& c) { return c.label == label; });
  return it == classes.end() ? nullptr : &*it;
}

SummaryReport summarize(const LabeledDataset& ds) {
  if (ds.empty()) throw Error("cannot summarize an empty dataset");
  std::map<std::string, std::pair<std::size_t, double>> acc;
  for (const auto& row : ds.rows) {
    auto& [count, sum] = acc[row.label];
    ++count;
    sum += row.final;
  }
  SummaryReport report;
  report.size = ds.size();
  for (const auto& [label, cs] : acc) report.classes.push_back({label, cs.first, cs.second / static_cast<double>(cs.first)});
  const auto finals = ds.finals();
  report.mean = mean(finals);
  report.median = median(finals);
  return report;
}

std::string render_text(const SummaryReport& report) {
  std::string out = fmt::format("rows {}  mean {:.4f}  median {:.4f}\n", report.size, report.mean, report.median);
  for (const auto& c : report.classes) {
    const double pct = 100.0 * static_cast<double>(c.count) / static_cast<double>(report.size);
    out += fmt::format("  class {:<15} count {:>5} ({:5.1f}%)  mean {:.4f}\n", c.label.empty() ? "(none)" : c.label,
                       c.count, pct, c.mean);
  }
  return out;
}

std::string render_text(const RegressionResult& result) {
  std::string out = fmt::format("R^2 {:.4f}\n  intercept {:+.6f}\n", result.r_squared, result.intercept);
  for (const auto& [name, c] : result.coefficients) out += fmt::format("  {:<15} {:+.6f}\n", name, c);
  return out;
}

std::string render_json(const SummaryReport& report) {
  nlohmann::ordered_json j;
  j["rows"] = report.size;
  j["mean"] = report.mean;
  j["median"] = report.median;
  j["classes"] = nlohmann::ordered_json::array();
  for (const auto& c : report.classes) j["classes"].push_back({{"label", c.label}, {"count", c.count}, {"mean", c.mean}});
  return j.dump(2);
}

std::string render_json(const RegressionResult& result) {
  nlohmann::ordered_json j;
  j["r_squared"] = result.r_squared;
  j["intercept"] = result.intercept;
  j["coefficients"] = nlohmann::ordered_json::object();
  for (const auto& [name, c] : result.coefficients) j["coefficients"][name] = c;
  return j.dump(2);
}

}  // namespace autometric
