#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gausslim/measures.hpp"
#include "gausslim/regvar.hpp"

namespace gausslim {

/// CltCentered: A_t = int_{|x|<=t} x x^T mu - m_t m_t^T with m_t the truncated mean.
/// CltUncentered: the same without the centering term.
/// LevyRaw: A_t = int_{|x|<=t} x x^T M.
enum class CurveForm { CltCentered, CltUncentered, LevyRaw };
std::string_view to_string(CurveForm f) noexcept;

struct MomentCurve {
  CurveForm form = CurveForm::CltCentered;
  std::vector<double> radii;
  std::vector<Eigen::MatrixXd> matrices;  ///< A_t
  std::vector<double> trace;              ///< U(t) = tr A_t
  std::vector<double> raw_trace;          ///< int_{|x|<=t} |x|^2, never centered
  std::vector<Eigen::VectorXd> first_moment;
  std::vector<double> tail_mass;

  std::size_t size() const noexcept { return radii.size(); }
  int dim() const noexcept { return matrices.empty() ? 0 : static_cast<int>(matrices.front().rows()); }
};

/// Radii must be positive and strictly increasing. Radii are processed in parallel.
MomentCurve build_curve(const ProbMeasure& m, std::span<const double> radii,
                        CurveForm form = CurveForm::CltCentered);
MomentCurve build_curve(const LevyMeasure& m, std::span<const double> radii);

struct MRVOptions {
  RVOptions rv;
  double tol_matrix = 0.05;
  double rank_tol = 1e-6;
  double trailing_fraction = 0.25;
};

struct MRVReport {
  LimitPoint limit = LimitPoint::Infinity;
  bool is_mrv0 = false;
  Eigen::MatrixXd b_hat;  ///< unit trace
  std::optional<double> k_convention;     ///< 1 / tr(target)
  std::optional<double> target_distance;  ///< |B_hat - target / tr(target)|_F
  RVDiagnosis trace_diagnosis;
  double matrix_residual = 0.0;
  int rank = 0;
  std::size_t points_used = 0;
  std::vector<std::string> warnings;
};

/// Matrix regular variation diagnosis of a curve toward `limit`.
MRVReport mrv_diagnose(const MomentCurve& curve, LimitPoint limit,
                       const std::optional<Eigen::MatrixXd>& target_b = std::nullopt,
                       const MRVOptions& opts = {});

struct StabilityResult {
  std::vector<double> discrepancy;  ///< per family member
  std::vector<double> relative;     ///< discrepancy over tr of the larger-radius matrix
  double trailing_sup = 0.0;
  double final_value = 0.0;
  double final_relative = 0.0;
};

/// |int_{|x|<=a} x x^T M_n - int_{|x|<=b} x x^T M_n|_F along a family of measures.
StabilityResult radius_stability_check(std::span<const LevyMeasure> family, double a, double b,
                                       double trailing_fraction = 0.25);

struct CenteringComparison {
  std::vector<double> radii;
  std::vector<double> discrepancy;  ///< max pairwise Frobenius distance of the three ratios
  double trailing_max = 0.0;
  double final_value = 0.0;
};

/// Compares S_t / tr S_t, (S_t - m m^T) / tr S_t and (S_t - m m^T) / tr(S_t - m m^T)
/// for a law with infinite second and finite first moment.
CenteringComparison centered_uncentered_compare(const ProbMeasure& m, std::span<const double> radii,
                                                double trailing_fraction = 0.25);

/// One row per radius: t, U, raw trace, tail mass, A_t row-major.
void write_curve_csv(std::ostream& os, const MomentCurve& c);

}  // namespace gausslim
