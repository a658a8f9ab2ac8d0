#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

#include "gausslim/measures.hpp"
#include "gausslim/rng.hpp"

// Monte Carlo hot loops. Each kernel has a serial reference and an OpenMP
// version; replicate i always draws from stream (seed, label, i), so both
// produce bit-identical output regardless of thread count.
namespace gausslim::kernels {

/// Rows a * (X_1 + ... + X_n) - xi for iid X_i from `measure`.
struct SumJob {
  const ProbMeasure* measure = nullptr;
  std::size_t summands = 1;
  std::size_t replicates = 1;
  double a = 1.0;
  Eigen::VectorXd xi;
  Seed seed;
  std::string label = "sums";
};

Eigen::MatrixXd normalized_sums_serial(const SumJob& job);
Eigen::MatrixXd normalized_sums_omp(const SumJob& job);

/// Rows scale * (drift + compound Poisson(rate, jumps) + factor * Z) - shift.
struct PathJob {
  const JumpSampler* jumps = nullptr;
  double rate = 0.0;
  Eigen::VectorXd drift;
  Eigen::MatrixXd factor;  // empty when small jumps are discarded
  double scale = 1.0;
  Eigen::VectorXd shift;
  std::size_t paths = 1;
  Seed seed;
  std::string label = "paths";
};

Eigen::MatrixXd levy_paths_serial(const PathJob& job);
Eigen::MatrixXd levy_paths_omp(const PathJob& job);

/// Pooled two-sample data for the energy test: Euclidean distances between
/// rows (first n1 rows are sample one) stored row-major as floats.
struct EnergyData {
  std::size_t n1 = 0, n2 = 0;
  std::vector<float> dist;
  std::vector<double> row_sum;
  double total = 0.0;
};

EnergyData energy_data(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

/// Scaled energy statistic n1 n2 / (n1 + n2) * E for the split where the rows
/// flagged 1 in `group` form sample one.
double energy_statistic(const EnergyData& e, const std::vector<float>& group);

/// Number of random relabelings with statistic >= observed.
std::size_t energy_exceedances_serial(const EnergyData& e, double observed, std::size_t permutations,
                                      Seed seed);
std::size_t energy_exceedances_omp(const EnergyData& e, double observed, std::size_t permutations,
                                   Seed seed);

}  // namespace gausslim::kernels
