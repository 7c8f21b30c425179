#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace autometric {

enum class MfShape { trapezoid, z_spline, s_spline, generalized_bell, gaussian };

/// Canonical (MATLAB toolbox) name: trapmf, zmf, smf, gbellmf, gaussmf.
std::string_view shape_name(MfShape shape) noexcept;

/// Accepts the canonical names, the long enum names and the "gbelfm" spelling.
std::optional<MfShape> parse_shape(std::string_view name) noexcept;

/// Number of parameters a shape takes.
std::size_t shape_arity(MfShape shape) noexcept;

/// Parameterized membership curve.
///
/// Parameter layouts:
///   trapezoid        [a, b, c, d]            a <= b <= c <= d
///   z_spline/s_spline [a, b]                  a < b
///   generalized_bell [width, slope, center]  width > 0, slope > 0
///   gaussian         [sigma, center]         sigma > 0
///
/// A trapezoid with a == b (or c == d) is a step shoulder: degree 1 from the
/// step onward, 0 beyond it.
class MembershipFunction {
 public:
  /// Validating constructor; throws ValidationError.
  MembershipFunction(MfShape shape, std::span<const double> params);
  MembershipFunction(MfShape shape, std::initializer_list<double> params);

  /// Skips validation so a loader can collect every violation of a whole
  /// model before reporting. Evaluation stays memory safe regardless.
  static MembershipFunction unchecked(MfShape shape, std::span<const double> params);

  static MembershipFunction trapezoid(double a, double b, double c, double d);
  static MembershipFunction z_spline(double a, double b);
  static MembershipFunction s_spline(double a, double b);
  static MembershipFunction generalized_bell(double width, double slope, double center);
  static MembershipFunction gaussian(double sigma, double center);

  /// Degree of membership in [0, 1].
  double operator()(double x) const noexcept;

  MfShape shape() const noexcept { return shape_; }
  std::span<const double> params() const noexcept { return {params_.data(), std::min(count_, params_.size())}; }

  /// Empty iff the parameters satisfy the shape's invariants.
  std::vector<std::string> violations() const;

  friend bool operator==(const MembershipFunction&, const MembershipFunction&) = default;

 private:
  MembershipFunction() = default;

  MfShape shape_ = MfShape::trapezoid;
  std::array<double, 4> params_{};
  std::size_t count_ = 0;
};

inline double eval_mf(const MembershipFunction& mf, double x) noexcept { return mf(x); }

}  // namespace autometric
