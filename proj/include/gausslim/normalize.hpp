#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gausslim/measures.hpp"
#include "gausslim/moment_matrix.hpp"
#include "gausslim/regvar.hpp"

namespace gausslim {

enum class Branch { FiniteVariance, InfiniteVariance, Levy };
std::string_view to_string(Branch b) noexcept;

/// Normalizing scale a and shift xi per abscissa (sample count n or time t).
struct ScalingPlan {
  Branch branch = Branch::FiniteVariance;
  LimitPoint limit = LimitPoint::Infinity;
  double k_used = 1.0;
  std::vector<double> abscissae;
  std::vector<double> a;
  std::vector<Eigen::VectorXd> xi;
  std::string formula;
  std::vector<std::string> warnings;

  /// Index of the abscissa equal to x up to 1e-12 relative; throws OutOfRange.
  std::size_t index_of(double x) const;
};

/// h(t) = t^2 / int_{|x|<=t} |x|^2 from the uncentered trace of the curve.
/// Leading radii with zero trace are dropped and reported through `warnings`.
RVFunction build_h(const MomentCurve& curve, LimitPoint limit,
                   std::vector<std::string>* warnings = nullptr);

struct CltScalingOptions {
  std::optional<Branch> force_branch;
  double stabilization_tol = 1e-6;  ///< relative spread of U over the last decade
};

/// True when the centered trace varies by at most `tol` (relative) over the
/// last decade of radii.
bool trace_stabilized(const MomentCurve& curve, double tol = 1e-6);

ScalingPlan clt_scaling(const ProbMeasure& m, const MomentCurve& curve, const MRVReport& mrv, double k,
                        std::span<const double> n_grid, const CltScalingOptions& opts = {});

ScalingPlan levy_scaling(const LevyTriplet& triplet, const MomentCurve& curve, const MRVReport& mrv,
                         double k, std::span<const double> t_grid);

/// abscissa, a, xi_1, ..., xi_d
void write_plan_csv(std::ostream& os, const ScalingPlan& plan);

}  // namespace gausslim
