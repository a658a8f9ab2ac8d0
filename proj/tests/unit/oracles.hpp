#pragma once

// Independent numerical oracles for the tests: plain bisection and composite
// Simpson rules, sharing no code with the library.

#include <cmath>
#include <functional>

namespace oracle {

inline double bisect(const std::function<double(double)>& g, double lo, double hi, int iters = 200) {
  double glo = g(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((gm > 0) == (glo > 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Geometric bisection for roots spanning many decades.
inline double bisect_log(const std::function<double(double)>& g, double lo, double hi, int iters = 300) {
  return std::exp(bisect([&](double u) { return g(std::exp(u)); }, std::log(lo), std::log(hi), iters));
}

inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Simpson in u = log r of f(r) dr.
inline double simpson_log(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  return simpson([&](double u) { return f(std::exp(u)) * std::exp(u); }, std::log(a), std::log(b), n);
}

}  // namespace oracle
