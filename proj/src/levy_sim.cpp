#include "gausslim/levy_sim.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "gausslim/detail/format.hpp"
#include "gausslim/errors.hpp"
#include "gausslim/kernels.hpp"

namespace gausslim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// radius where M(|x| > eps) = target
double budget_cutoff(const LevyMeasure& m, double target) {
  const double floor = m.support_floor();
  const double ceil = m.support_ceiling();
  if (floor > 0 && m.tail_mass(floor) <= target) return 0.5 * floor;

  double lo = floor > 0 ? floor : std::min(1.0, 0.5 * ceil);
  while (!(m.tail_mass(lo) > target)) {
    lo *= 0.1;
    if (lo < 1e-300) throw Error(Errc::InfiniteIntensity, "no cutoff reaches the jump budget");
  }
  double hi = std::isfinite(ceil) ? ceil : std::max(1.0, lo) * 10.0;
  while (m.tail_mass(hi) > target) {
    hi *= 10.0;
    if (hi > 1e300) throw Error(Errc::InvalidArgument, "tail mass does not decay");
  }
  auto f = [&](double u) { return std::log(m.tail_mass(std::exp(u)) + 1e-300) - std::log(target); };
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(f, std::log(lo), std::log(hi),
                                                         boost::math::tools::eps_tolerance<double>(40), iters);
  return std::exp(0.5 * (a + b));
}

void fill_at(ResolvedCutoff& r, const LevyTriplet& tr, double t, double eps) {
  r.epsilon = eps;
  r.rate = t * tr.measure.tail_mass(eps);
  if (!std::isfinite(r.rate)) throw Error(Errc::InfiniteIntensity, "jump intensity above the cutoff is infinite");
  r.small_cov = t * tr.measure.truncated(eps).second;
  r.drift = t * (tr.drift + tr.measure.compensated_first_moment(eps));
  const double v = r.small_cov.trace();
  r.gate_value = v > 0 ? std::sqrt(v) / eps : kInf;
}

Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal();
}

Eigen::MatrixXd run_paths(const LevyTriplet& triplet, double t, const SimConfig& cfg, double scale,
                          const Eigen::VectorXd& shift, ResolvedCutoff* resolved) {
  if (!(t > 0)) throw Error(Errc::InvalidArgument, "time must be positive");
  if (cfg.n_paths < 1) throw Error(Errc::InvalidArgument, "n_paths must be at least 1");
  ResolvedCutoff rc = resolve_cutoff(triplet, t, cfg);
  const JumpSampler jumps(triplet.measure, rc.epsilon);
  kernels::PathJob job;
  job.jumps = &jumps;
  job.rate = rc.rate;
  job.drift = rc.drift;
  if (cfg.small_jump_mode == SmallJumpMode::GaussianSubstitute && rc.small_cov.trace() > 0) {
    job.factor = psd_factor(rc.small_cov);
  }
  job.scale = scale;
  job.shift = shift;
  job.paths = cfg.n_paths;
  job.seed = cfg.seed;
  job.label = cfg.label + "/t=" + detail::num(t);
  Eigen::MatrixXd out = kernels::levy_paths_omp(job);
  if (resolved) *resolved = std::move(rc);
  return out;
}

}  // namespace

ResolvedCutoff resolve_cutoff(const LevyTriplet& triplet, double t, const SimConfig& cfg) {
  if (!(t > 0)) throw Error(Errc::InvalidArgument, "time must be positive");
  const LevyMeasure& m = triplet.measure;
  double eps;
  if (cfg.jump_cutoff) {
    eps = *cfg.jump_cutoff;
    if (!(eps > 0)) throw Error(Errc::InfiniteIntensity, "jump cutoff must be positive");
  } else {
    eps = budget_cutoff(m, cfg.jump_budget / t);
  }
  ResolvedCutoff r;
  fill_at(r, triplet, t, eps);
  if (cfg.small_jump_mode != SmallJumpMode::GaussianSubstitute) return r;
  while (r.gate_value < cfg.gate) {
    const double next = 0.5 * r.epsilon;
    if (t * m.tail_mass(next) > cfg.max_expected_jumps) {
      std::ostringstream os;
      os << "substitution gate " << r.gate_value << " < " << cfg.gate << " at eps " << r.epsilon
         << "; jump budget exhausted";
      r.warnings.push_back(os.str());
      break;
    }
    std::ostringstream os;
    os << "substitution gate " << r.gate_value << " < " << cfg.gate << " at eps " << r.epsilon << "; halving";
    r.warnings.push_back(os.str());
    const int h = r.halvings + 1;
    auto w = std::move(r.warnings);
    fill_at(r, triplet, t, next);
    r.halvings = h;
    r.warnings = std::move(w);
  }
  return r;
}

Eigen::MatrixXd simulate_marginal(const LevyTriplet& triplet, double t, const SimConfig& cfg,
                                  ResolvedCutoff* resolved) {
  return run_paths(triplet, t, cfg, 1.0, Eigen::VectorXd::Zero(triplet.dim()), resolved);
}

Eigen::MatrixXd scaled_marginal(const LevyTriplet& triplet, const ScalingPlan& plan, double t,
                                const SimConfig& cfg, ResolvedCutoff* resolved) {
  const std::size_t i = plan.index_of(t);
  return run_paths(triplet, t, cfg, plan.a[i], plan.xi[i], resolved);
}

LevyMeasure rescaled_measure(const LevyMeasure& m, double t, double a) { return m.rescaled(t, a); }

std::vector<LevyMeasure> rescaled_family(const LevyMeasure& m, const ScalingPlan& plan) {
  std::vector<LevyMeasure> fam;
  fam.reserve(plan.abscissae.size());
  for (std::size_t i = 0; i < plan.abscissae.size(); ++i) fam.push_back(m.rescaled(plan.abscissae[i], plan.a[i]));
  return fam;
}

std::vector<DecayPoint> eta_moment_decay(const LevyMeasure& m, const ScalingPlan& plan, double eta, double s) {
  if (!(eta >= 0.0 && eta < 2.0)) throw Error(Errc::InvalidArgument, "eta must lie in [0, 2)");
  if (!(s > 0)) throw Error(Errc::InvalidArgument, "radius must be positive");
  if (!std::isfinite(m.eta_tail_moment(eta, 1.0))) {
    throw Error(Errc::DivergentMoment, "int_{|x|>1} |x|^eta M(dx) diverges");
  }
  std::vector<DecayPoint> out;
  for (std::size_t i = 0; i < plan.abscissae.size(); ++i) {
    const double t = plan.abscissae[i];
    const double v = m.rescaled(t, plan.a[i]).eta_tail_moment(eta, s);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "eta moment diverges at t = " << t;
      throw Error(Errc::DivergentMoment, os.str());
    }
    out.push_back({t, v});
  }
  return out;
}

Eigen::VectorXd accompanying_drift(const LevyTriplet& triplet, const ScalingPlan& plan, std::size_t i) {
  const double t = plan.abscissae.at(i);
  const double a = plan.a.at(i);
  const LevyMeasure mt = triplet.measure.rescaled(t, a);
  return a * t * (triplet.drift + triplet.measure.compensated_first_moment(1.0 / a)) - plan.xi[i] -
         mt.compensated_first_moment(1.0);
}

void write_decay_csv(std::ostream& os, std::span<const DecayPoint> curve) {
  os << "t,value\n";
  for (const auto& p : curve) os << detail::num(p.t) << ',' << detail::num(p.value) << '\n';
}

}  // namespace gausslim
