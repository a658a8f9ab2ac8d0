#include <cmath>

#include "gausslim/errors.hpp"
#include "kernels_common.hpp"

namespace gausslim::kernels {

Eigen::MatrixXd normalized_sums_serial(const SumJob& job) {
  const int d = job.measure->dim();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(
      static_cast<Eigen::Index>(job.replicates), d);
  PointSampler ps(*job.measure);
  std::vector<double> acc(static_cast<std::size_t>(d));
  for (std::size_t r = 0; r < job.replicates; ++r) detail::one_sum(job, ps, r, acc, out.data() + r * d);
  return out;
}

Eigen::MatrixXd levy_paths_serial(const PathJob& job) {
  const auto d = static_cast<std::size_t>(job.drift.size());
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(
      static_cast<Eigen::Index>(job.paths), static_cast<Eigen::Index>(d));
  std::vector<double> jump(d), z(d);
  for (std::size_t r = 0; r < job.paths; ++r) detail::one_path(job, r, jump, z, out.data() + r * d);
  return out;
}

EnergyData energy_data(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.cols() != y.cols()) throw Error(Errc::InvalidArgument, "energy samples differ in dimension");
  EnergyData e;
  e.n1 = static_cast<std::size_t>(x.rows());
  e.n2 = static_cast<std::size_t>(y.rows());
  const std::size_t n = e.n1 + e.n2;
  Eigen::MatrixXd pooled(static_cast<Eigen::Index>(n), x.cols());
  pooled << x, y;
  e.dist.assign(n * n, 0.0f);
  e.row_sum.assign(n, 0.0);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t i = 0; i < n; ++i) {
    double rs = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = (pooled.row(static_cast<Eigen::Index>(i)) - pooled.row(static_cast<Eigen::Index>(j))).norm();
      e.dist[i * n + j] = static_cast<float>(v);
      rs += static_cast<float>(v);
    }
    e.row_sum[i] = rs;
  }
  for (double r : e.row_sum) e.total += r;
  return e;
}

double energy_statistic(const EnergyData& e, const std::vector<float>& group) {
  const std::size_t n = e.n1 + e.n2;
  double sxx = 0, s1 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (group[i] == 0.0f) continue;
    const float* row = &e.dist[i * n];
    float dot = 0.0f;
#pragma omp simd reduction(+ : dot)
    for (std::size_t j = 0; j < n; ++j) dot += row[j] * group[j];
    sxx += dot;
    s1 += e.row_sum[i];
  }
  const double sxy = s1 - sxx;
  const double syy = e.total - sxx - 2.0 * sxy;
  const double n1 = static_cast<double>(e.n1), n2 = static_cast<double>(e.n2);
  const double energy = 2.0 * sxy / (n1 * n2) - sxx / (n1 * n1) - syy / (n2 * n2);
  return n1 * n2 / (n1 + n2) * energy;
}

std::size_t energy_exceedances_serial(const EnergyData& e, double observed, std::size_t permutations, Seed seed) {
  const std::size_t n = e.n1 + e.n2;
  std::vector<std::size_t> idx(n);
  std::vector<float> group(n);
  std::size_t count = 0;
  for (std::size_t p = 0; p < permutations; ++p) {
    if (detail::permuted_statistic(e, p, seed, idx, group) >= observed) ++count;
  }
  return count;
}

}  // namespace gausslim::kernels
