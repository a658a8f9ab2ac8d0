#pragma once

#include <Eigen/Dense>

#include <string>

#include "gausslim/rng.hpp"

namespace gausslim {

struct RangeSplit {
  Eigen::MatrixXd range;   ///< d x r orthonormal columns
  Eigen::MatrixXd kernel;  ///< d x (d - r)
  Eigen::VectorXd range_eigenvalues;
};

/// Eigen-split of a symmetric nonnegative-definite B; eigenvalues above
/// rank_tol * max go to the range.
RangeSplit range_split(const Eigen::MatrixXd& b, double rank_tol = 1e-6);

struct GofOptions {
  double alpha = 0.01;
  double tol_cov = 0.10;
  double tol_kernel_rel = 0.01;  ///< times tr B
  double tol_mean_rel = 0.05;    ///< times sqrt(tr B)
  std::size_t permutations = 200;
  std::size_t energy_max_points = 2000;  ///< per side
  double rank_tol = 1e-6;
};

struct GofReport {
  std::size_t n = 0;
  int rank = 0;
  double mean_norm = 0.0;
  double cov_frobenius_rel = 0.0;
  double kernel_leak = 0.0;
  double energy_statistic = 0.0;
  double energy_pvalue = 1.0;
  bool pass = false;
  // informational, not part of the verdict
  double variance_ratio = 0.0;     ///< tr Cov / tr B
  double robust_scale_rel = 0.0;   ///< max over range directions of |MAD scale / sqrt(lambda) - 1|
};

/// Compares samples (one per row) with N(0, B).
GofReport gaussian_gof(const Eigen::MatrixXd& samples, const Eigen::MatrixXd& b, Seed seed,
                       const GofOptions& opts = {});

}  // namespace gausslim
