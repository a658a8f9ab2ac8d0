#pragma once

#include <algorithm>
#include <numeric>
#include <random>

#include "gausslim/kernels.hpp"

namespace gausslim::kernels::detail {

inline void one_sum(const SumJob& job, PointSampler& ps, std::size_t r, std::vector<double>& acc, double* out) {
  Engine eng = derive_stream(job.seed, job.label, r);
  std::fill(acc.begin(), acc.end(), 0.0);
  ps.accumulate(eng, job.summands, acc);
  for (std::size_t j = 0; j < acc.size(); ++j) out[j] = job.a * acc[j] - job.xi[static_cast<Eigen::Index>(j)];
}

inline void one_path(const PathJob& job, std::size_t r, std::vector<double>& jump, std::vector<double>& z,
                     double* out) {
  Engine eng = derive_stream(job.seed, job.label, r);
  const auto d = static_cast<std::size_t>(job.drift.size());
  for (std::size_t j = 0; j < d; ++j) out[j] = job.drift[static_cast<Eigen::Index>(j)];
  if (job.rate > 0) {
    std::poisson_distribution<long long> pois(job.rate);
    const long long n = pois(eng);
    for (long long k = 0; k < n; ++k) {
      job.jumps->draw(eng, jump);
      for (std::size_t j = 0; j < d; ++j) out[j] += jump[j];
    }
  }
  if (job.factor.size() > 0) {
    std::normal_distribution<double> normal;
    for (std::size_t j = 0; j < d; ++j) z[j] = normal(eng);
    for (std::size_t i = 0; i < d; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < d; ++j) s += job.factor(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * z[j];
      out[i] += s;
    }
  }
  for (std::size_t j = 0; j < d; ++j) out[j] = job.scale * out[j] - job.shift[static_cast<Eigen::Index>(j)];
}

inline double permuted_statistic(const EnergyData& e, std::size_t p, Seed seed, std::vector<std::size_t>& idx,
                                 std::vector<float>& group) {
  Engine eng = derive_stream(seed, "energy-permutation", p);
  std::iota(idx.begin(), idx.end(), 0);
  // partial Fisher-Yates: the first n1 positions become sample one
  for (std::size_t i = 0; i < e.n1; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(eng)]);
  }
  std::fill(group.begin(), group.end(), 0.0f);
  for (std::size_t i = 0; i < e.n1; ++i) group[idx[i]] = 1.0f;
  return energy_statistic(e, group);
}

}  // namespace gausslim::kernels::detail
