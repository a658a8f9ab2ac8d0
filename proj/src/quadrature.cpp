#include "gausslim/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "gausslim/errors.hpp"

namespace gausslim::quad {

namespace {
constexpr std::size_t kMaxPieces = 4000;
constexpr double kTargetRel = 1e-12;

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

struct Piece {
  double a, b, value, error, l1;
  bool operator<(const Piece& o) const { return error < o.error; }
};

// One 31-point rule on [a, b]. The non-adaptive boost call reports the error of
// the rule mapped to [-1, 1]; it is rescaled here.
template <class G>
Piece rule(const G& g, double a, double b) {
  double err = 0.0, l1 = 0.0;
  const double v = GK::integrate(g, a, b, 0, 0.0, &err, &l1);
  return {a, b, v, err * 0.5 * (b - a), l1};
}

// Global adaptive bisection of the piece with the largest error estimate.
template <class G>
Result adaptive(const G& g, double a, double b) {
  std::priority_queue<Piece> heap;
  heap.push(rule(g, a, b));
  Result r{heap.top().value, heap.top().error, heap.top().l1};
  while (heap.size() < kMaxPieces && std::isfinite(r.value) &&
         r.error > kTargetRel * std::max(std::abs(r.value), 1e-3 * r.l1)) {
    const Piece worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.pop();
    const Piece left = rule(g, worst.a, mid), right = rule(g, mid, worst.b);
    r.value += left.value + right.value - worst.value;
    r.error += left.error + right.error - worst.error;
    r.l1 += left.l1 + right.l1 - worst.l1;
    heap.push(left);
    heap.push(right);
  }
  // resum to drop the drift of the running updates
  r = Result{};
  while (!heap.empty()) {
    r.value += heap.top().value;
    r.error += heap.top().error;
    r.l1 += heap.top().l1;
    heap.pop();
  }
  return r;
}
}  // namespace

Result integrate(const std::function<double(double)>& f, double lo, double hi) {
  if (lo == hi) return Result{};
  if (lo > hi) {
    Result r = integrate(f, hi, lo);
    r.value = -r.value;
    return r;
  }
  auto guarded = [&f](double x) {
    const double v = f(x);
    return std::isnan(v) ? 0.0 : v;
  };
  const bool inf_lo = std::isinf(lo), inf_hi = std::isinf(hi);
  if (!inf_lo && !inf_hi) return adaptive(guarded, lo, hi);
  if (!inf_lo) {
    return adaptive([&](double t) { const double s = 1.0 - t; return guarded(lo + t / s) / (s * s); }, 0.0, 1.0);
  }
  if (!inf_hi) {
    return adaptive([&](double t) { const double s = 1.0 - t; return guarded(hi - t / s) / (s * s); }, 0.0, 1.0);
  }
  return adaptive(
      [&](double t) {
        const double s = 1.0 - t * t;
        return guarded(t / s) * (1.0 + t * t) / (s * s);
      },
      -1.0, 1.0);
}

double checked(const std::function<double(double)>& f, double lo, double hi, double rel_tol,
               const char* what) {
  const Result r = integrate(f, lo, hi);
  const double scale = std::max(std::abs(r.value), 1e-14 * r.l1);
  if (!std::isfinite(r.value) || !(r.error <= rel_tol * scale || r.error == 0.0)) {
    std::ostringstream os;
    os << what << " on [" << lo << ", " << hi << "]: value " << r.value << ", error estimate "
       << r.error;
    throw Error(Errc::QuadratureNonconvergence, os.str());
  }
  return r.value;
}

bool converges(const std::function<double(double)>& f, double lo, double hi, double rel_tol) {
  const Result r = integrate(f, lo, hi);
  if (!std::isfinite(r.value)) return false;
  const double scale = std::max(std::abs(r.value), 1e-14 * r.l1);
  return r.error == 0.0 || r.error <= rel_tol * scale;
}

}  // namespace gausslim::quad
