// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are pinned
// here, independent of the scenario configs. Criteria listed in kKnownRed fail
// for mathematical reasons (see README); they print FAIL but only an
// unexpected failure makes the process exit nonzero.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gausslim/errors.hpp"
#include "gausslim/gof.hpp"
#include "gausslim/kernels.hpp"
#include "gausslim/levy_sim.hpp"
#include "gausslim/moment_matrix.hpp"
#include "gausslim/normalize.hpp"
#include "gausslim/runner.hpp"

using namespace gausslim;

namespace {

constexpr std::uint64_t kSeed = 20240601;

// Pinned tolerances.
constexpr double kC1CovRel = 0.05;
constexpr double kC1Pvalue = 0.01;
constexpr double kC1ScaleRel = 1e-9;
constexpr double kC2BHat = 0.02;
constexpr double kC2TraceRel = 1e-4;
constexpr double kC2CovRel = 0.15;
constexpr double kC3BHat = 1e-9;
constexpr double kC3Leak = 0.01;  // times tr B
constexpr double kC4IndexLo = 0.4, kC4IndexHi = 0.6;
constexpr double kC5Composition = 0.05;
constexpr double kC5Index = 0.05;
constexpr double kC6VarRatio = 0.10;
constexpr double kC6Decay = 0.01;
constexpr double kC7VarRatio = 0.15;
constexpr double kC7TraceRel = 1e-6;
constexpr double kC8Relative = 0.02;
constexpr double kC9Centering = 0.02;
constexpr double kC10BHat = 0.10;
constexpr int kC11Seeds = 50;
constexpr std::size_t kC11Samples = 1000;
constexpr double kC11Alpha = 0.01;

const std::map<int, std::string> kKnownRed = {
    {2, "normalized sums have infinite variance at every n; sample covariance does not settle"},
    {6, "scaled marginals have infinite variance at every t; variance ratio does not settle"},
    {7, "Var(a_t X_t) / tr B = log(a_t) / 2 diverges as t -> 0"},
    {9, "uncentered offset is 1 / (2 log t + 1) = 0.035 at t = 1e6; 0.02 needs t > 4e10"},
};

struct Line {
  int id;
  std::string title;
  bool pass;
  std::string detail;
  double seconds;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

ProbMeasure inverse_fourth(Eigen::VectorXd center = {}) {
  PowerLawShape rho;
  rho.coef = 1.0 / std::numbers::pi;
  rho.exponent = 4.0;
  rho.r_min = 1.0;
  return ProbMeasure::radial_from_lebesgue(rho, 2, std::move(center));
}

LevyTriplet large_time() {
  PowerLawShape rho;
  rho.exponent = 3.0;
  rho.r_min = 1.0;
  return LevyTriplet(LevyMeasure::radial_from_lebesgue(rho, 1), Eigen::VectorXd::Zero(1));
}

LevyTriplet small_time() {
  LogCorrectedShape rho;
  rho.exponent = 3.0;
  rho.log_power = 2.0;
  rho.r_max = std::exp(-2.0);
  return LevyTriplet(LevyMeasure::radial_from_lebesgue(rho, 1), Eigen::VectorXd::Zero(1));
}

GofReport sums_gof(const ProbMeasure& m, const ScalingPlan& plan, double n, std::size_t reps,
                   const Eigen::MatrixXd& b, const std::string& label) {
  const std::size_t i = plan.index_of(n);
  kernels::SumJob job;
  job.measure = &m;
  job.summands = static_cast<std::size_t>(n);
  job.replicates = reps;
  job.a = plan.a[i];
  job.xi = plan.xi[i];
  job.seed = Seed{kSeed};
  job.label = label + "/n=" + fmt(n);
  return gaussian_gof(kernels::normalized_sums_omp(job), b, Seed{splitmix64(kSeed ^ bits_of(n))});
}

GofReport levy_gof(const LevyTriplet& tr, const ScalingPlan& plan, double t, std::size_t paths,
                   const Eigen::MatrixXd& b, const std::string& label) {
  SimConfig cfg;
  cfg.n_paths = paths;
  cfg.seed = Seed{kSeed};
  cfg.label = label;
  return gaussian_gof(scaled_marginal(tr, plan, t, cfg), b, Seed{splitmix64(kSeed ^ bits_of(t))});
}

// Large-time plan over t = 1e2 .. 1e290, for the analytic limits along the rescaled family.
ScalingPlan far_plan(const LevyTriplet& tr) {
  const auto curve = build_curve(tr.measure, log_grid(1.0, 1e150, 4));
  const auto mrv = mrv_diagnose(curve, LimitPoint::Infinity);
  std::vector<double> ts;
  for (int e = 2; e <= 290; e += 24) ts.push_back(std::pow(10.0, e));
  return levy_scaling(tr, curve, mrv, 1.0, ts);
}

Line c1() {
  const auto m = ProbMeasure::uniform_box(Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1));
  const Eigen::MatrixXd b = Eigen::Matrix2d::Identity() / 2.0;
  const auto curve = build_curve(m, log_grid(1.5, 1e6, 16));
  const auto mrv = mrv_diagnose(curve, LimitPoint::Infinity, b);
  const auto plan = clt_scaling(m, curve, mrv, *mrv.k_convention, std::vector<double>{4096});
  const double scale_err = std::abs(plan.a[0] * std::sqrt(4096.0) / std::sqrt(1.5) - 1.0);
  const auto g = sums_gof(m, plan, 4096, 20000, b, "box");
  const bool ok = plan.branch == Branch::FiniteVariance && scale_err < kC1ScaleRel && plan.xi[0].norm() < 1e-12 &&
                  g.pass && g.cov_frobenius_rel < kC1CovRel && g.energy_pvalue > kC1Pvalue;
  return {1, "finite-variance CLT, box at n = 4096", ok,
          "a_n rel err " + fmt(scale_err) + ", cov_rel " + fmt(g.cov_frobenius_rel) + " (< 0.05), p " +
              fmt(g.energy_pvalue) + " (> 0.01), gof " + (g.pass ? "pass" : "fail"),
          0};
}

Line c2() {
  const auto m = inverse_fourth();
  const Eigen::MatrixXd b = Eigen::Matrix2d::Identity() / 2.0;
  const auto curve = build_curve(m, log_grid(1.0, 1e10, 16));
  const auto mrv = mrv_diagnose(curve, LimitPoint::Infinity, b);
  double trace_err = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve.radii[i] > 1.0) trace_err = std::max(trace_err, std::abs(curve.trace[i] / (2.0 * std::log(curve.radii[i])) - 1.0));
  }
  const std::vector<double> ns{1e3, 1e4, 1e5};
  const auto plan = clt_scaling(m, curve, mrv, *mrv.k_convention, ns);
  std::vector<double> cov;
  for (double n : ns) cov.push_back(sums_gof(m, plan, n, 10000, b, "inverse-fourth").cov_frobenius_rel);
  const bool decreasing = cov[1] < cov[0] && cov[2] < cov[1];
  const bool ok = mrv.is_mrv0 && *mrv.target_distance < kC2BHat && trace_err < kC2TraceRel && cov[2] < kC2CovRel &&
                  decreasing;
  return {2, "infinite-variance CLT, |x|^-4 in R^2", ok,
          std::string("is_mrv0 ") + (mrv.is_mrv0 ? "true" : "false") + ", B_hat dist " + fmt(*mrv.target_distance) +
              ", trace rel err " + fmt(trace_err) + ", cov_rel at n = 1e3/1e4/1e5: " + fmt(cov[0]) + " " +
              fmt(cov[1]) + " " + fmt(cov[2]) + " (< 0.15 at 1e5, decreasing: " + (decreasing ? "yes" : "no") + ")",
          0};
}

Line c3() {
  Eigen::MatrixXd map(2, 1);
  map << std::sqrt(0.5), std::sqrt(0.5);
  const auto m = ProbMeasure::linear_image(
      map, ProbMeasure::uniform_box(Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 1.0)));
  Eigen::MatrixXd b(2, 2);
  b << 0.5, 0.5, 0.5, 0.5;
  const auto curve = build_curve(m, log_grid(1.5, 1e6, 16));
  const auto mrv = mrv_diagnose(curve, LimitPoint::Infinity, b);
  const auto plan = clt_scaling(m, curve, mrv, *mrv.k_convention, std::vector<double>{1e4});
  const auto g = sums_gof(m, plan, 1e4, 10000, b, "degenerate");
  const bool ok = mrv.rank == 1 && (mrv.b_hat - b).norm() < kC3BHat && g.kernel_leak < kC3Leak * b.trace();
  return {3, "degenerate limit (Z, Z) / sqrt 2", ok,
          "rank " + std::to_string(mrv.rank) + ", |B_hat - B| " + fmt((mrv.b_hat - b).norm()) + ", kernel leak " +
              fmt(g.kernel_leak) + " (< 0.01 tr B)",
          0};
}

Line c4() {
  const auto s = find_builtin("stable-tails-negative");
  const auto dir = std::filesystem::temp_directory_path() / "gausslim-acceptance-c4";
  const auto r = run_scenario(*s, kSeed, {}, dir);
  std::filesystem::remove_all(dir);
  PowerLawShape rho;
  rho.coef = 1.5 / (2.0 * std::numbers::pi);
  rho.exponent = 3.5;
  rho.r_min = 1.0;
  const auto curve = build_curve(ProbMeasure::radial_from_lebesgue(rho, 2), log_grid(1.0, 1e8, 16));
  const auto mrv = mrv_diagnose(curve, LimitPoint::Infinity);
  const double idx = mrv.trace_diagnosis.index_estimate;
  const bool ok = idx >= kC4IndexLo && idx <= kC4IndexHi && !mrv.is_mrv0 && r.scaling_skipped.has_value() && !r.error;
  return {4, "negative control, alpha = 1.5 tails", ok,
          "trace index " + fmt(idx) + ", is_mrv0 " + (mrv.is_mrv0 ? "true" : "false") + ", skipped: " +
              r.scaling_skipped.value_or("no"),
          0};
}

Line c5() {
  const auto h = RVFunction::tabulate([](double t) { return t * t / (2.0 * std::log(t)); }, 10.0, 1e10,
                                      LimitPoint::Infinity);
  const auto inv = asymptotic_inverse(h, 2.0);
  double sup = 0;
  for (double x : log_grid(1e3, 1e8, 64)) sup = std::max(sup, std::abs(h(inv(x)) / x - 1.0));
  const double idx = estimate_rv_index(inv).index_estimate;
  const bool ok = sup < kC5Composition && std::abs(idx - 0.5) < kC5Index;
  return {5, "asymptotic inverse of t^2 / (2 log t)", ok,
          "sup |h(h^-1(x))/x - 1| " + fmt(sup) + " (< 0.05), inverse index " + fmt(idx), 0};
}

Line c6() {
  const auto tr = large_time();
  const auto curve = build_curve(tr.measure, log_grid(1.0, 1e120, 4));
  const auto mrv = mrv_diagnose(curve, LimitPoint::Infinity);
  const Eigen::MatrixXd b = mrv.b_hat;
  const std::vector<double> ts{1e2, 1e3, 1e4};
  const auto plan = levy_scaling(tr, curve, mrv, 1.0, ts);
  std::vector<double> dev;
  for (double t : ts) dev.push_back(std::abs(levy_gof(tr, plan, t, 10000, b, "levy-large").variance_ratio - 1.0));
  const bool improving = dev[1] < dev[0] && dev[2] < dev[1];
  const auto far = far_plan(tr);
  bool decay_ok = true;
  double worst_final = 0;
  for (double eta : {0.0, 1.0}) {
    for (double s : {0.5, 1.0, 2.0}) {
      const auto d = eta_moment_decay(tr.measure, far, eta, s);
      for (std::size_t i = 1; i < d.size(); ++i) decay_ok = decay_ok && d[i].value < d[i - 1].value;
      worst_final = std::max(worst_final, d.back().value);
    }
  }
  decay_ok = decay_ok && worst_final < kC6Decay;
  const bool ok = mrv.is_mrv0 && dev[2] <= kC6VarRatio && improving && decay_ok;
  return {6, "Levy large time, |x|^-3 in R", ok,
          "|var ratio - 1| at t = 1e2/1e3/1e4: " + fmt(dev[0]) + " " + fmt(dev[1]) + " " + fmt(dev[2]) +
              " (<= 0.10 at 1e4, improving: " + (improving ? "yes" : "no") + "), decay monotone to " +
              fmt(worst_final) + " at t = 1e290 (< 0.01: " + (decay_ok ? "yes" : "no") + ")",
          0};
}

Line c7() {
  const auto tr = small_time();
  const auto curve = build_curve(tr.measure, log_grid(1e-12, 0.13, 16));
  double trace_err = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    trace_err = std::max(trace_err, std::abs(curve.trace[i] * std::log(1.0 / curve.radii[i]) / 2.0 - 1.0));
  }
  const auto mrv = mrv_diagnose(curve, LimitPoint::Zero);
  const std::vector<double> ts{1e-2, 1e-3, 1e-4};
  const auto plan = levy_scaling(tr, curve, mrv, 1.0, ts);
  const double ratio = levy_gof(tr, plan, 1e-4, 10000, mrv.b_hat, "levy-small").variance_ratio;
  const bool ok = mrv.is_mrv0 && trace_err < kC7TraceRel && std::abs(ratio - 1.0) <= kC7VarRatio;
  return {7, "Levy small time, log-corrected density", ok,
          "U(t) rel err vs 2/log(1/t) " + fmt(trace_err) + ", var ratio at t = 1e-4 " + fmt(ratio) +
              " (within 0.15 of 1), a_t " + fmt(plan.a[2]),
          0};
}

Line c8() {
  const auto tr = large_time();
  const auto far = far_plan(tr);
  const auto fam = rescaled_family(tr.measure, far);
  double worst = 0;
  std::string detail;
  for (auto [a, b] : {std::pair{0.5, 1.0}, std::pair{1.0, 2.0}, std::pair{0.5, 2.0}}) {
    const auto s = radius_stability_check(fam, a, b);
    worst = std::max(worst, s.final_relative);
    detail += "(" + fmt(a) + ", " + fmt(b) + "): " + fmt(s.relative.front()) + " at t = 1e2 -> " +
              fmt(s.final_relative) + " at t = 1e290; ";
  }
  return {8, "radius stability of the rescaled family", worst < kC8Relative, detail + "max " + fmt(worst) + " (< 0.02)",
          0};
}

Line c9() {
  const auto cc = centered_uncentered_compare(inverse_fourth(Eigen::Vector2d(1.0, 0.0)), log_grid(1.0, 1e6, 16));
  return {9, "centered vs uncentered ratios, shifted |x|^-4", cc.final_value <= kC9Centering,
          "max pairwise discrepancy at t = 1e6: " + fmt(cc.final_value) + " (<= 0.02)", 0};
}

Line c10() {
  const auto tr = large_time();
  const auto curve = build_curve(tr.measure, log_grid(1.0, 1e120, 4));
  const auto model = mrv_diagnose(curve, LimitPoint::Infinity);
  SimConfig cfg;
  cfg.n_paths = 1000000;
  cfg.seed = Seed{kSeed};
  cfg.label = "corollary";
  const Eigen::MatrixXd x = simulate_marginal(tr, 1.0, cfg);
  const double top = x.cwiseAbs().maxCoeff();
  // X_1 = 0 with probability 1/e; the lower end only needs a positive trace
  const auto emp_curve = build_curve(ProbMeasure::empirical(x), log_grid(1e-2, top, 16));
  const auto emp = mrv_diagnose(emp_curve, LimitPoint::Infinity);
  const double dist = (model.b_hat - emp.b_hat).norm();
  return {10, "B_hat from M vs from simulated X_1", dist < kC10BHat,
          "|B_hat(M) - B_hat(X_1)| " + fmt(dist) + " (< 0.10) from 1e6 samples", 0};
}

Line c11() {
  const Eigen::MatrixXd b = Eigen::Matrix2d::Identity() / 2.0;
  int rejections = 0;
  for (int k = 0; k < kC11Seeds; ++k) {
    std::mt19937_64 gen(splitmix64(kSeed + static_cast<std::uint64_t>(k)));
    std::normal_distribution<double> z(0.0, std::sqrt(0.5));
    Eigen::MatrixXd x(static_cast<Eigen::Index>(kC11Samples), 2);
    for (Eigen::Index i = 0; i < x.rows(); ++i) x.row(i) << z(gen), z(gen);
    const auto g = gaussian_gof(x, b, Seed{splitmix64(kSeed ^ static_cast<std::uint64_t>(k))});
    if (g.energy_pvalue <= kC11Alpha) ++rejections;
  }
  const double mean = kC11Seeds * kC11Alpha;
  const double sd = std::sqrt(kC11Seeds * kC11Alpha * (1.0 - kC11Alpha));
  const bool ok = std::abs(rejections - mean) <= 3.0 * sd;
  return {11, "GOF level under the null", ok,
          std::to_string(rejections) + " rejections in " + std::to_string(kC11Seeds) + " at alpha 0.01 (allowed <= " +
              fmt(mean + 3.0 * sd) + ")",
          0};
}

}  // namespace

// Optional arguments select criteria by number.
int main(int argc, char** argv) {
  using Clock = std::chrono::steady_clock;
  Line (*const criteria[])() = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11};
  int unexpected = 0;
  int id = 0;
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  for (auto fn : criteria) {
    ++id;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = Clock::now();
    Line l;
    try {
      l = fn();
    } catch (const std::exception& e) {
      l = {id, "criterion threw", false, e.what(), 0};
    }
    l.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    const auto red = kKnownRed.find(l.id);
    std::string tag = l.pass ? "PASS" : "FAIL";
    if (!l.pass && red != kKnownRed.end()) tag += " [known: " + red->second + "]";
    if (l.pass && red != kKnownRed.end()) tag += " [known failure now passes]";
    if (!l.pass && red == kKnownRed.end()) ++unexpected;
    std::cout << "C" << l.id << " " << tag << " | " << l.title << " | " << l.detail << " | " << fmt(l.seconds) << " s"
              << std::endl;
  }
  std::cout << (unexpected == 0 ? "acceptance: no unexpected failures" : "acceptance: unexpected failures") << "\n";
  return unexpected == 0 ? 0 : 1;
}
