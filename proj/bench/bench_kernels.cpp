#include <benchmark/benchmark.h>
#include <omp.h>

#include <cmath>

#include "gausslim/kernels.hpp"

using namespace gausslim;

namespace {

const ProbMeasure& heavy_2d() {
  static const ProbMeasure m = [] {
    PowerLawShape rho;
    rho.coef = 1.0 / 3.141592653589793;
    rho.exponent = 4.0;
    rho.r_min = 1.0;
    return ProbMeasure::radial_from_lebesgue(rho, 2);
  }();
  return m;
}

kernels::SumJob sum_job(std::size_t summands) {
  kernels::SumJob job;
  job.measure = &heavy_2d();
  job.summands = summands;
  job.replicates = 2000;
  job.a = 1.0 / std::sqrt(static_cast<double>(summands));
  job.xi = Eigen::Vector2d::Zero();
  job.seed = Seed{1};
  return job;
}

void BM_SumsSerial(benchmark::State& st) {
  const auto job = sum_job(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::normalized_sums_serial(job));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(job.summands * job.replicates));
}

void BM_SumsOmp(benchmark::State& st) {
  const auto job = sum_job(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::normalized_sums_omp(job));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(job.summands * job.replicates));
  st.counters["threads"] = omp_get_max_threads();
}

struct Paths {
  LevyMeasure measure;
  JumpSampler jumps;
  kernels::PathJob job;
  Paths()
      : measure([] {
          PowerLawShape rho;
          rho.exponent = 3.0;
          rho.r_min = 1.0;
          return LevyMeasure::radial_from_lebesgue(rho, 1);
        }()),
        jumps(measure, 1.0) {
    job.jumps = &jumps;
    job.rate = 100.0 * jumps.intensity();
    job.drift = Eigen::VectorXd::Zero(1);
    job.scale = 0.1;
    job.shift = Eigen::VectorXd::Zero(1);
    job.paths = 10000;
    job.seed = Seed{2};
  }
};

void BM_PathsSerial(benchmark::State& st) {
  const Paths p;
  for (auto _ : st) benchmark::DoNotOptimize(kernels::levy_paths_serial(p.job));
}

void BM_PathsOmp(benchmark::State& st) {
  const Paths p;
  for (auto _ : st) benchmark::DoNotOptimize(kernels::levy_paths_omp(p.job));
}

kernels::EnergyData energy_fixture(std::size_t n) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 2), y(static_cast<Eigen::Index>(n), 2);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    x.row(i) << std::sin(1.0 + i), std::cos(3.0 * i);
    y.row(i) << std::sin(2.0 * i), std::cos(0.5 + i);
  }
  return kernels::energy_data(x, y);
}

void BM_EnergySerial(benchmark::State& st) {
  const auto e = energy_fixture(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::energy_exceedances_serial(e, 0.0, 50, Seed{3}));
}

void BM_EnergyOmp(benchmark::State& st) {
  const auto e = energy_fixture(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::energy_exceedances_omp(e, 0.0, 50, Seed{3}));
}

}  // namespace

BENCHMARK(BM_SumsSerial)->Arg(64)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SumsOmp)->Arg(64)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PathsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PathsOmp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnergySerial)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnergyOmp)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
