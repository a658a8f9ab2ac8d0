#include "gausslim/gof.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gausslim/errors.hpp"
#include "gausslim/kernels.hpp"

namespace gausslim {

namespace {

// 1 / Phi^{-1}(3/4): MAD to standard deviation for a normal law
constexpr double kMadToSigma = 1.482602218505602;

double median(std::vector<double> v) {
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
  double med = v[m];
  if (v.size() % 2 == 0) med = 0.5 * (med + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m)));
  return med;
}

}  // namespace

RangeSplit range_split(const Eigen::MatrixXd& b, double rank_tol) {
  if (b.rows() != b.cols() || b.rows() < 1) throw Error(Errc::InvalidArgument, "B must be square");
  if ((b - b.transpose()).norm() > 1e-10 * std::max(1.0, b.norm())) {
    throw Error(Errc::InvalidArgument, "B must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  if (!(top > 0)) throw Error(Errc::ZeroMatrix, "B is zero; the limit would be a point mass");
  if (ev.minCoeff() < -1e-10 * top) throw Error(Errc::InvalidArgument, "B is not nonnegative-definite");
  std::vector<int> in, out;
  for (int i = static_cast<int>(ev.size()); i-- > 0;) (ev[i] > rank_tol * top ? in : out).push_back(i);
  RangeSplit s;
  s.range.resize(b.rows(), static_cast<Eigen::Index>(in.size()));
  s.kernel.resize(b.rows(), static_cast<Eigen::Index>(out.size()));
  s.range_eigenvalues.resize(static_cast<Eigen::Index>(in.size()));
  for (std::size_t k = 0; k < in.size(); ++k) {
    s.range.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(in[k]);
    s.range_eigenvalues[static_cast<Eigen::Index>(k)] = ev[in[k]];
  }
  for (std::size_t k = 0; k < out.size(); ++k) s.kernel.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(out[k]);
  return s;
}

GofReport gaussian_gof(const Eigen::MatrixXd& samples, const Eigen::MatrixXd& b, Seed seed, const GofOptions& opts) {
  const auto n = static_cast<std::size_t>(samples.rows());
  if (n < 1000) throw Error(Errc::TooFewSamples, "need at least 1000 samples, got " + std::to_string(n));
  if (samples.cols() != b.rows()) throw Error(Errc::InvalidArgument, "sample dimension differs from B");
  if (!samples.allFinite()) throw Error(Errc::InvalidArgument, "samples contain non-finite values");
  const RangeSplit split = range_split(b, opts.rank_tol);
  const double trb = b.trace();

  GofReport rep;
  rep.n = n;
  rep.rank = static_cast<int>(split.range.cols());
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  rep.mean_norm = mean.norm();
  const Eigen::MatrixXd centered = samples.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
  rep.cov_frobenius_rel = (cov - b).norm() / b.norm();
  rep.kernel_leak = split.kernel.cols() > 0 ? (split.kernel.transpose() * cov * split.kernel).trace() : 0.0;
  rep.variance_ratio = cov.trace() / trb;

  const Eigen::MatrixXd proj = samples * split.range;
  for (Eigen::Index k = 0; k < proj.cols(); ++k) {
    std::vector<double> col(proj.col(k).data(), proj.col(k).data() + proj.rows());
    const double med = median(col);
    for (double& x : col) x = std::abs(x - med);
    const double sigma = kMadToSigma * median(std::move(col));
    rep.robust_scale_rel = std::max(rep.robust_scale_rel, std::abs(sigma / std::sqrt(split.range_eigenvalues[k]) - 1.0));
  }

  // energy test on the range coordinates against fresh Gaussian draws
  const std::size_t m = std::min(n, opts.energy_max_points);
  const Eigen::MatrixXd x = proj.topRows(static_cast<Eigen::Index>(m));
  Eigen::MatrixXd y(static_cast<Eigen::Index>(m), proj.cols());
  Engine eng = derive_stream(seed, "gof-reference", 0);
  std::normal_distribution<double> normal;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    for (Eigen::Index k = 0; k < y.cols(); ++k) y(i, k) = std::sqrt(split.range_eigenvalues[k]) * normal(eng);
  }
  const kernels::EnergyData e = kernels::energy_data(x, y);
  std::vector<float> group(2 * m, 0.0f);
  std::fill(group.begin(), group.begin() + static_cast<std::ptrdiff_t>(m), 1.0f);
  rep.energy_statistic = kernels::energy_statistic(e, group);
  const std::size_t exceed = kernels::energy_exceedances_omp(e, rep.energy_statistic, opts.permutations, seed);
  rep.energy_pvalue = static_cast<double>(1 + exceed) / static_cast<double>(opts.permutations + 1);

  rep.pass = rep.cov_frobenius_rel < opts.tol_cov && rep.kernel_leak < opts.tol_kernel_rel * trb &&
             rep.energy_pvalue > opts.alpha && rep.mean_norm < opts.tol_mean_rel * std::sqrt(trb);
  return rep;
}

}  // namespace gausslim
