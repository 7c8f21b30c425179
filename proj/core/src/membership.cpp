#include "autometric/membership.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "autometric/error.hpp"

namespace autometric {

namespace {

double z_curve(double a, double b, double x) noexcept {
  if (x <= a) return 1.0;
  if (x >= b) return 0.0;
  const double w = b - a;
  if (x <= 0.5 * (a + b)) {
    const double u = (x - a) / w;
    return 1.0 - 2.0 * u * u;
  }
  const double u = (b - x) / w;
  return 2.0 * u * u;
}

double s_curve(double a, double b, double x) noexcept {
  if (x <= a) return 0.0;
  if (x >= b) return 1.0;
  const double w = b - a;
  if (x <= 0.5 * (a + b)) {
    const double u = (x - a) / w;
    return 2.0 * u * u;
  }
  const double u = (b - x) / w;
  return 1.0 - 2.0 * u * u;
}

double trapezoid_curve(double a, double b, double c, double d, double x) noexcept {
  if (x < a || x > d) return 0.0;
  if (x >= b && x <= c) return 1.0;
  if (x < b) return (x - a) / (b - a);  // a < b here, else x >= b
  return (d - x) / (d - c);             // c < d here, else x <= c
}

}  // namespace

std::string_view shape_name(MfShape shape) noexcept {
  switch (shape) {
    case MfShape::trapezoid: return "trapmf";
    case MfShape::z_spline: return "zmf";
    case MfShape::s_spline: return "smf";
    case MfShape::generalized_bell: return "gbellmf";
    case MfShape::gaussian: return "gaussmf";
  }
  return "unknown";
}

std::optional<MfShape> parse_shape(std::string_view name) noexcept {
  if (name == "trapmf" || name == "trapezoid") return MfShape::trapezoid;
  if (name == "zmf" || name == "z_spline") return MfShape::z_spline;
  if (name == "smf" || name == "s_spline") return MfShape::s_spline;
  if (name == "gbellmf" || name == "gbelfm" || name == "generalized_bell") return MfShape::generalized_bell;
  if (name == "gaussmf" || name == "gaussian") return MfShape::gaussian;
  return std::nullopt;
}

std::size_t shape_arity(MfShape shape) noexcept {
  switch (shape) {
    case MfShape::trapezoid: return 4;
    case MfShape::z_spline:
    case MfShape::s_spline: return 2;
    case MfShape::generalized_bell: return 3;
    case MfShape::gaussian: return 2;
  }
  return 0;
}

MembershipFunction MembershipFunction::unchecked(MfShape shape, std::span<const double> params) {
  MembershipFunction mf;
  mf.shape_ = shape;
  mf.count_ = std::min(params.size(), mf.params_.size());
  std::copy_n(params.begin(), mf.count_, mf.params_.begin());
  // A too-long list is kept as a violation marker; the extra values are dropped.
  if (params.size() > mf.params_.size()) mf.count_ = mf.params_.size() + 1;
  return mf;
}

MembershipFunction::MembershipFunction(MfShape shape, std::span<const double> params)
    : MembershipFunction(unchecked(shape, params)) {
  if (auto v = violations(); !v.empty()) throw ValidationError(std::move(v));
}

MembershipFunction::MembershipFunction(MfShape shape, std::initializer_list<double> params)
    : MembershipFunction(shape, std::span<const double>(params.begin(), params.size())) {}

MembershipFunction MembershipFunction::trapezoid(double a, double b, double c, double d) {
  return {MfShape::trapezoid, {a, b, c, d}};
}

MembershipFunction MembershipFunction::z_spline(double a, double b) { return {MfShape::z_spline, {a, b}}; }

MembershipFunction MembershipFunction::s_spline(double a, double b) { return {MfShape::s_spline, {a, b}}; }

MembershipFunction MembershipFunction::generalized_bell(double width, double slope, double center) {
  return {MfShape::generalized_bell, {width, slope, center}};
}

MembershipFunction MembershipFunction::gaussian(double sigma, double center) {
  return {MfShape::gaussian, {sigma, center}};
}

std::vector<std::string> MembershipFunction::violations() const {
  std::vector<std::string> out;
  const auto name = shape_name(shape_);
  if (count_ != shape_arity(shape_)) {
    out.push_back(fmt::format("{} takes {} parameters, got {}", name, shape_arity(shape_),
                              count_ > params_.size() ? "more than 4" : std::to_string(count_)));
    return out;
  }
  const auto p = params();
  if (std::any_of(p.begin(), p.end(), [](double v) { return !std::isfinite(v); })) {
    out.push_back(fmt::format("{} parameters must be finite", name));
    return out;
  }
  switch (shape_) {
    case MfShape::trapezoid:
      if (!(p[0] <= p[1] && p[1] <= p[2] && p[2] <= p[3]))
        out.push_back(fmt::format("trapmf parameters [{}] violate a <= b <= c <= d", fmt::join(p, ", ")));
      break;
    case MfShape::z_spline:
    case MfShape::s_spline:
      if (!(p[0] < p[1])) out.push_back(fmt::format("{} parameters [{}] violate a < b", name, fmt::join(p, ", ")));
      break;
    case MfShape::generalized_bell:
      if (!(p[0] > 0.0)) out.push_back(fmt::format("gbellmf width must be positive, got {}", p[0]));
      if (!(p[1] > 0.0)) out.push_back(fmt::format("gbellmf slope must be positive, got {}", p[1]));
      break;
    case MfShape::gaussian:
      if (!(p[0] > 0.0)) out.push_back(fmt::format("gaussmf sigma must be positive, got {}", p[0]));
      break;
  }
  return out;
}

double MembershipFunction::operator()(double x) const noexcept {
  const auto& p = params_;
  double y = 0.0;
  switch (shape_) {
    case MfShape::trapezoid: y = trapezoid_curve(p[0], p[1], p[2], p[3], x); break;
    case MfShape::z_spline: y = z_curve(p[0], p[1], x); break;
    case MfShape::s_spline: y = s_curve(p[0], p[1], x); break;
    case MfShape::generalized_bell: {
      const double r = std::abs((x - p[2]) / p[0]);
      y = 1.0 / (1.0 + std::pow(r, 2.0 * p[1]));
      break;
    }
    case MfShape::gaussian: {
      const double r = (x - p[1]) / p[0];
      y = std::exp(-0.5 * r * r);
      break;
    }
  }
  // Unvalidated parameters can yield NaN; keep the [0, 1] contract anyway.
  if (!(y >= 0.0)) return 0.0;
  return std::min(y, 1.0);
}

}  // namespace autometric
