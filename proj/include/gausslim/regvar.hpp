#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace gausslim {

enum class LimitPoint { Zero, Infinity };

constexpr LimitPoint flipped(LimitPoint c) noexcept {
  return c == LimitPoint::Zero ? LimitPoint::Infinity : LimitPoint::Zero;
}
std::string_view to_string(LimitPoint c) noexcept;
LimitPoint limit_point_from_string(std::string_view s);

/// Log-spaced grid from lo to hi inclusive with `per_decade` points per decade.
std::vector<double> log_grid(double lo, double hi, int per_decade = 64);

/// A positive function of one variable, tabulated on a strictly increasing
/// positive grid spanning at least four decades, together with the point
/// (0 or infinity) at which its regular variation is of interest.
class RVFunction {
 public:
  static constexpr std::size_t kMinPoints = 8;
  static constexpr double kMinDecades = 4.0;

  RVFunction(std::vector<double> grid, std::vector<double> values, LimitPoint limit);

  static RVFunction tabulate(const std::function<double(double)>& f, double lo, double hi,
                             LimitPoint limit, int per_decade = 64);

  std::span<const double> grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  LimitPoint limit_point() const noexcept { return limit_; }
  std::size_t size() const noexcept { return grid_.size(); }
  double decades() const noexcept;

  /// Log-log linear interpolation; throws Errc::OutOfRange outside the grid.
  double operator()(double x) const;
  bool contains(double x) const noexcept;

 private:
  std::vector<double> grid_;
  std::vector<double> values_;
  LimitPoint limit_;
};

struct RVOptions {
  double trailing_fraction = 0.25;
  double tol_slow = 0.1;
  double tol_ratio = 0.15;
  std::vector<double> scales{2.0, 5.0, 10.0};
};

struct RatioPoint {
  double scale;
  double ratio;
};

struct RVDiagnosis {
  double index_estimate = 0.0;
  double index_stderr = 0.0;
  bool is_slowly_varying = false;
  std::vector<RatioPoint> ratio_curve;
};

/// Least-squares log-log slope over the trailing part of the grid (toward the
/// limit point) plus edge ratio tests f(s t)/f(t). Functions at zero go through
/// `reciprocal_transform` and are diagnosed at infinity; the ratio curve then
/// refers to the transformed function.
RVDiagnosis estimate_rv_index(const RVFunction& f, const RVOptions& opts = {});

/// h(x) = 1 / f(1/x) on the reciprocal grid, with the limit point flipped.
RVFunction reciprocal_transform(const RVFunction& f);

/// Nondecreasing envelope used before inversion at infinity:
/// H(t_i) = min_{j >= i} f(t_j). Agrees with f wherever f is eventually increasing.
std::vector<double> monotone_envelope(std::span<const double> values);

struct InverseOptions {
  double index_tol = 0.1;
  int per_decade = 64;
};

/// Generalized inverse inf{y > 0 : H(y) > x} of the monotone envelope of f,
/// tabulated on a log grid of the value range. Requires assume_index > 0 and
/// an estimated index of f within `index_tol` of it.
RVFunction asymptotic_inverse(const RVFunction& f, double assume_index,
                              const InverseOptions& opts = {});

void write_csv(std::ostream& os, const RVFunction& f);
RVFunction read_rv_csv(std::istream& is, LimitPoint limit);

}  // namespace gausslim
