#include "gausslim/moment_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "gausslim/detail/format.hpp"
#include "gausslim/detail/parallel.hpp"
#include "gausslim/errors.hpp"

namespace gausslim {

namespace {

void validate_radii(std::span<const double> radii) {
  if (radii.empty()) throw Error(Errc::InvalidArgument, "radius grid is empty");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0) || !std::isfinite(radii[i])) {
      throw Error(Errc::InvalidArgument, "radii must be positive and finite");
    }
    if (i > 0 && !(radii[i] > radii[i - 1])) throw Error(Errc::InvalidArgument, "radii must increase strictly");
  }
}

template <class Measure>
MomentCurve build(const Measure& m, std::span<const double> radii, CurveForm form) {
  validate_radii(radii);
  const std::size_t n = radii.size();
  MomentCurve c;
  c.form = form;
  c.radii.assign(radii.begin(), radii.end());
  c.matrices.resize(n);
  c.trace.resize(n);
  c.raw_trace.resize(n);
  c.first_moment.resize(n);
  c.tail_mass.resize(n);
  detail::ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < n; ++i) {
    slot.run([&] {
      TruncatedMoments tm = m.truncated(radii[i]);
      c.raw_trace[i] = tm.second.trace();
      if (form == CurveForm::CltCentered) {
        if (!tm.first_finite) throw Error(Errc::DivergentMoment, "truncated mean diverges");
        tm.second -= tm.first * tm.first.transpose();
      }
      c.matrices[i] = 0.5 * (tm.second + tm.second.transpose());
      c.trace[i] = c.matrices[i].trace();
      c.first_moment[i] = std::move(tm.first);
      c.tail_mass[i] = tm.tail_mass;
    });
  }
  slot.rethrow();
  return c;
}

std::size_t trailing_count(std::size_t n, double fraction) {
  const auto m = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  return std::min(n, std::max<std::size_t>(RVFunction::kMinPoints, m));
}

}  // namespace

std::string_view to_string(CurveForm f) noexcept {
  switch (f) {
    case CurveForm::CltCentered: return "clt_centered";
    case CurveForm::CltUncentered: return "clt_uncentered";
    case CurveForm::LevyRaw: return "levy_raw";
  }
  return "unknown";
}

MomentCurve build_curve(const ProbMeasure& m, std::span<const double> radii, CurveForm form) {
  if (form == CurveForm::LevyRaw) {
    throw Error(Errc::InvalidArgument, "the raw Levy form needs a Levy measure");
  }
  return build(m, radii, form);
}

MomentCurve build_curve(const LevyMeasure& m, std::span<const double> radii) {
  return build(m, radii, CurveForm::LevyRaw);
}

MRVReport mrv_diagnose(const MomentCurve& curve, LimitPoint limit,
                       const std::optional<Eigen::MatrixXd>& target_b, const MRVOptions& opts) {
  MRVReport rep;
  rep.limit = limit;
  const std::size_t n = curve.size();
  if (n == 0) throw Error(Errc::InvalidArgument, "empty curve");

  // traces at rounding level of the raw second moment count as zero
  double scale = 0;
  for (double r : curve.raw_trace) scale = std::max(scale, std::abs(r));
  const double floor = 1e-12 * scale;

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i) {
    if (curve.trace[i] > floor) keep.push_back(i);
  }
  if (keep.size() < RVFunction::kMinPoints) {
    throw Error(Errc::VanishingTrace, "trace vanishes on the curve; the measure sits at a point");
  }
  const std::size_t window = trailing_count(n, opts.trailing_fraction);
  const bool at_inf = limit == LimitPoint::Infinity;
  for (std::size_t k = 0; k < window; ++k) {
    const std::size_t i = at_inf ? n - 1 - k : k;
    if (!(curve.trace[i] > floor)) {
      std::ostringstream os;
      os << "trace vanishes at radius " << curve.radii[i] << " toward the limit point";
      throw Error(Errc::VanishingTrace, os.str());
    }
  }
  if (keep.size() < n) {
    std::ostringstream os;
    os << "dropped " << n - keep.size() << " radii with zero trace";
    rep.warnings.push_back(os.str());
  }
  rep.points_used = keep.size();

  std::vector<double> g, v;
  for (std::size_t i : keep) {
    g.push_back(curve.radii[i]);
    v.push_back(curve.trace[i]);
  }
  rep.trace_diagnosis = estimate_rv_index(RVFunction(std::move(g), std::move(v), limit), opts.rv);

  const int d = curve.dim();
  Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t k = 0; k < window; ++k) {
    const std::size_t i = at_inf ? n - 1 - k : k;
    avg += curve.matrices[i] / curve.trace[i];
  }
  avg /= static_cast<double>(window);
  avg = 0.5 * (avg + avg.transpose());
  rep.b_hat = avg / avg.trace();

  for (std::size_t k = 0; k < window; ++k) {
    const std::size_t i = at_inf ? n - 1 - k : k;
    rep.matrix_residual = std::max(rep.matrix_residual, (curve.matrices[i] / curve.trace[i] - rep.b_hat).norm());
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rep.b_hat, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().maxCoeff();
  rep.rank = static_cast<int>((es.eigenvalues().array() > opts.rank_tol * top).count());

  if (target_b) {
    if (target_b->rows() != d || target_b->cols() != d) {
      throw Error(Errc::InvalidArgument, "target matrix has the wrong shape");
    }
    const double tr = target_b->trace();
    if (!(tr > 0)) throw Error(Errc::ZeroMatrix, "target matrix has nonpositive trace");
    rep.k_convention = 1.0 / tr;
    rep.target_distance = (rep.b_hat - *target_b / tr).norm();
  }
  rep.is_mrv0 = rep.trace_diagnosis.is_slowly_varying && rep.matrix_residual < opts.tol_matrix;
  return rep;
}

StabilityResult radius_stability_check(std::span<const LevyMeasure> family, double a, double b,
                                       double trailing_fraction) {
  if (family.size() < 8) {
    throw Error(Errc::FamilyTooShort, "need at least 8 family members, got " + std::to_string(family.size()));
  }
  if (!(a > 0) || !(b > 0)) throw Error(Errc::InvalidArgument, "radii must be positive");
  const std::size_t n = family.size();
  StabilityResult r;
  r.discrepancy.resize(n);
  r.relative.resize(n);
  detail::ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < n; ++i) {
    slot.run([&] {
      if (a == b) return;
      const Eigen::MatrixXd sa = family[i].truncated(a).second;
      const Eigen::MatrixXd sb = family[i].truncated(b).second;
      r.discrepancy[i] = (sa - sb).norm();
      const double ref = std::max(sa.trace(), sb.trace());
      r.relative[i] = ref > 0 ? r.discrepancy[i] / ref : 0.0;
    });
  }
  slot.rethrow();
  const auto m = static_cast<std::size_t>(std::ceil(trailing_fraction * static_cast<double>(n)));
  for (std::size_t i = n - std::max<std::size_t>(m, 1); i < n; ++i) {
    r.trailing_sup = std::max(r.trailing_sup, r.discrepancy[i]);
  }
  r.final_value = r.discrepancy.back();
  r.final_relative = r.relative.back();
  return r;
}

CenteringComparison centered_uncentered_compare(const ProbMeasure& m, std::span<const double> radii,
                                                double trailing_fraction) {
  if (m.finite_second_moment()) {
    throw Error(Errc::FiniteSecondMoment, "the comparison needs an infinite second moment");
  }
  if (!m.finite_first_moment()) {
    throw Error(Errc::DivergentMoment, "the comparison needs a finite first moment");
  }
  const MomentCurve c = build_curve(m, radii, CurveForm::CltUncentered);
  CenteringComparison out;
  out.radii = c.radii;
  out.discrepancy.resize(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Eigen::MatrixXd& s = c.matrices[i];
    const double tr = s.trace();
    if (!(tr > 0)) continue;
    const Eigen::MatrixXd centered = s - c.first_moment[i] * c.first_moment[i].transpose();
    const Eigen::MatrixXd r1 = s / tr;
    const Eigen::MatrixXd r2 = centered / tr;
    const Eigen::MatrixXd r3 = centered / centered.trace();
    out.discrepancy[i] = std::max({(r1 - r2).norm(), (r1 - r3).norm(), (r2 - r3).norm()});
  }
  const std::size_t n = c.size();
  const auto w = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(trailing_fraction * n)));
  for (std::size_t i = n - std::min(w, n); i < n; ++i) out.trailing_max = std::max(out.trailing_max, out.discrepancy[i]);
  out.final_value = out.discrepancy.back();
  return out;
}

void write_curve_csv(std::ostream& os, const MomentCurve& c) {
  const int d = c.dim();
  os << "t,U,raw_trace,tail_mass";
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) os << ",A" << i + 1 << j + 1;
  }
  os << '\n';
  for (std::size_t k = 0; k < c.size(); ++k) {
    os << detail::num(c.radii[k]) << ',' << detail::num(c.trace[k]) << ',' << detail::num(c.raw_trace[k])
       << ',' << detail::num(c.tail_mass[k]);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) os << ',' << detail::num(c.matrices[k](i, j));
    }
    os << '\n';
  }
}

}  // namespace gausslim
