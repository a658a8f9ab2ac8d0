#pragma once

#include <functional>

namespace gausslim::quad {

/// Relative error ceiling above which an integral is reported as not converged.
inline constexpr double kDefaultRelTol = 1e-8;

struct Result {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

/// Adaptive Gauss-Kronrod on [lo, hi]; either bound may be infinite.
/// Never throws on its own; see `checked`.
Result integrate(const std::function<double(double)>& f, double lo, double hi);

/// Same as `integrate`, but throws Errc::QuadratureNonconvergence when the
/// estimated error exceeds `rel_tol` relative to max(|value|, 1e-14 * L1).
double checked(const std::function<double(double)>& f, double lo, double hi,
               double rel_tol = kDefaultRelTol, const char* what = "integral");

/// True when the integral converges to a finite value within `rel_tol`.
bool converges(const std::function<double(double)>& f, double lo, double hi,
               double rel_tol = 1e-6);

}  // namespace gausslim::quad
