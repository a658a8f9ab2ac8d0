#include "gausslim/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "gausslim/detail/format.hpp"
#include "gausslim/errors.hpp"

namespace gausslim {

namespace {

void require_domain(const MRVReport& mrv, const MomentCurve& curve) {
  if (!mrv.is_mrv0) {
    std::ostringstream os;
    os << "curve is not matrix regularly varying with index 0 (trace index "
       << mrv.trace_diagnosis.index_estimate << ", residual " << mrv.matrix_residual << ")";
    throw Error(Errc::NotInDomain, os.str());
  }
  if (curve.size() == 0) throw Error(Errc::InvalidArgument, "empty curve");
}

void require_k(double k) {
  if (!(k > 0) || !std::isfinite(k)) throw Error(Errc::InvalidArgument, "k must be positive");
}

void require_grid(std::span<const double> g) {
  if (g.empty()) throw Error(Errc::InvalidArgument, "abscissa grid is empty");
  for (double x : g) {
    if (!(x > 0) || !std::isfinite(x)) throw Error(Errc::InvalidArgument, "abscissae must be positive");
  }
}

}  // namespace

std::string_view to_string(Branch b) noexcept {
  switch (b) {
    case Branch::FiniteVariance: return "finite_variance";
    case Branch::InfiniteVariance: return "infinite_variance";
    case Branch::Levy: return "levy";
  }
  return "unknown";
}

std::size_t ScalingPlan::index_of(double x) const {
  for (std::size_t i = 0; i < abscissae.size(); ++i) {
    if (std::abs(abscissae[i] - x) <= 1e-12 * std::abs(x)) return i;
  }
  std::ostringstream os;
  os << "abscissa " << x << " is not on the plan grid";
  throw Error(Errc::OutOfRange, os.str());
}

RVFunction build_h(const MomentCurve& curve, LimitPoint limit, std::vector<std::string>* warnings) {
  std::vector<double> g, v;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double u = curve.raw_trace[i];
    if (!(u > 0)) {
      if (!g.empty()) {
        std::ostringstream os;
        os << "zero trace at interior radius " << curve.radii[i];
        throw Error(Errc::NonPositiveValues, os.str());
      }
      ++dropped;
      continue;
    }
    g.push_back(curve.radii[i]);
    v.push_back(curve.radii[i] * curve.radii[i] / u);
  }
  if (dropped > 0 && warnings) {
    warnings->push_back("h: dropped " + std::to_string(dropped) + " leading radii with zero trace");
  }
  return RVFunction(std::move(g), std::move(v), limit);
}

bool trace_stabilized(const MomentCurve& curve, double tol) {
  if (curve.size() < 2) return false;
  const double top = curve.radii.back();
  if (curve.radii.front() > top / 10.0) return false;
  double lo = curve.trace.back(), hi = curve.trace.back();
  for (std::size_t i = curve.size(); i-- > 0 && curve.radii[i] >= top / 10.0;) {
    lo = std::min(lo, curve.trace[i]);
    hi = std::max(hi, curve.trace[i]);
  }
  return hi > 0 && (hi - lo) <= tol * hi;
}

ScalingPlan clt_scaling(const ProbMeasure& m, const MomentCurve& curve, const MRVReport& mrv, double k,
                        std::span<const double> n_grid, const CltScalingOptions& opts) {
  require_domain(mrv, curve);
  require_k(k);
  require_grid(n_grid);
  if (curve.form != CurveForm::CltCentered) {
    throw Error(Errc::InvalidArgument, "CLT scaling needs a centered curve");
  }
  ScalingPlan p;
  p.limit = LimitPoint::Infinity;
  p.k_used = k;
  p.abscissae.assign(n_grid.begin(), n_grid.end());
  p.branch = opts.force_branch.value_or(trace_stabilized(curve, opts.stabilization_tol) ? Branch::FiniteVariance
                                                                                       : Branch::InfiniteVariance);
  if (p.branch == Branch::Levy) throw Error(Errc::InvalidArgument, "the Levy branch needs a triplet");

  if (p.branch == Branch::FiniteVariance) {
    const double var = curve.trace.back();
    if (!(var > 0)) throw Error(Errc::VanishingTrace, "covariance trace is zero");
    for (double n : n_grid) p.a.push_back(1.0 / std::sqrt(k * var * n));
    p.formula = "a_n = k^-1/2 (tr Cov)^-1/2 n^-1/2, tr Cov = " + detail::num(var);
  } else {
    const RVFunction h = build_h(curve, LimitPoint::Infinity, &p.warnings);
    const RVFunction hinv = asymptotic_inverse(h, 2.0);
    for (double n : n_grid) p.a.push_back(1.0 / (std::sqrt(k) * hinv(n)));
    p.formula = "a_n = k^-1/2 / h^<-(n), h(t) = t^2 / int_{|x|<=t} |x|^2";
  }
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    const double a = p.a[i];
    const TruncatedMoments tm = m.truncated(1.0 / a);
    if (!tm.first_finite) throw Error(Errc::DivergentMoment, "truncated mean diverges");
    p.xi.push_back(n_grid[i] * a * tm.first);
  }
  p.formula += "; xi_n = n a_n int_{|x|<=1/a_n} x";
  return p;
}

ScalingPlan levy_scaling(const LevyTriplet& triplet, const MomentCurve& curve, const MRVReport& mrv,
                         double k, std::span<const double> t_grid) {
  require_domain(mrv, curve);
  require_k(k);
  require_grid(t_grid);
  if (curve.form != CurveForm::LevyRaw) throw Error(Errc::InvalidArgument, "Levy scaling needs a raw curve");
  ScalingPlan p;
  p.branch = Branch::Levy;
  p.limit = mrv.limit;
  p.k_used = k;
  p.abscissae.assign(t_grid.begin(), t_grid.end());
  const RVFunction h = build_h(curve, mrv.limit, &p.warnings);
  const RVFunction hinv = asymptotic_inverse(h, 2.0);
  for (double t : t_grid) {
    const double a = 1.0 / (std::sqrt(k) * hinv(t));
    p.a.push_back(a);
    const Eigen::VectorXd drift = triplet.drift + triplet.measure.compensated_first_moment(1.0 / a);
    p.xi.push_back(a * t * drift);
  }
  p.formula =
      "a_t = k^-1/2 / h^<-(t), h(t) = t^2 / int_{|x|<=t} |x|^2 M; "
      "xi_t = a_t t (b + int x (1{|x|<=1/a_t} - 1/(1+|x|^2)) M)";
  return p;
}

void write_plan_csv(std::ostream& os, const ScalingPlan& plan) {
  const auto d = plan.xi.empty() ? 0 : plan.xi.front().size();
  os << "abscissa,a";
  for (Eigen::Index j = 0; j < d; ++j) os << ",xi" << j + 1;
  os << '\n';
  for (std::size_t i = 0; i < plan.abscissae.size(); ++i) {
    os << detail::num(plan.abscissae[i]) << ',' << detail::num(plan.a[i]);
    for (Eigen::Index j = 0; j < d; ++j) os << ',' << detail::num(plan.xi[i][j]);
    os << '\n';
  }
}

}  // namespace gausslim
