#include "gausslim/detail/parallel.hpp"
#include "kernels_common.hpp"

namespace gausslim::kernels {

Eigen::MatrixXd normalized_sums_omp(const SumJob& job) {
  const int d = job.measure->dim();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(
      static_cast<Eigen::Index>(job.replicates), d);
  gausslim::detail::ExceptionSlot slot;
#pragma omp parallel
  {
    PointSampler ps(*job.measure);
    std::vector<double> acc(static_cast<std::size_t>(d));
#pragma omp for schedule(dynamic, 8)
    for (std::size_t r = 0; r < job.replicates; ++r) {
      slot.run([&] { detail::one_sum(job, ps, r, acc, out.data() + r * d); });
    }
  }
  slot.rethrow();
  return out;
}

Eigen::MatrixXd levy_paths_omp(const PathJob& job) {
  const auto d = static_cast<std::size_t>(job.drift.size());
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(
      static_cast<Eigen::Index>(job.paths), static_cast<Eigen::Index>(d));
  gausslim::detail::ExceptionSlot slot;
#pragma omp parallel
  {
    std::vector<double> jump(d), z(d);
#pragma omp for schedule(dynamic, 64)
    for (std::size_t r = 0; r < job.paths; ++r) {
      slot.run([&] { detail::one_path(job, r, jump, z, out.data() + r * d); });
    }
  }
  slot.rethrow();
  return out;
}

std::size_t energy_exceedances_omp(const EnergyData& e, double observed, std::size_t permutations, Seed seed) {
  const std::size_t n = e.n1 + e.n2;
  std::size_t count = 0;
#pragma omp parallel reduction(+ : count)
  {
    std::vector<std::size_t> idx(n);
    std::vector<float> group(n);
#pragma omp for schedule(dynamic)
    for (std::size_t p = 0; p < permutations; ++p) {
      if (detail::permuted_statistic(e, p, seed, idx, group) >= observed) ++count;
    }
  }
  return count;
}

}  // namespace gausslim::kernels
