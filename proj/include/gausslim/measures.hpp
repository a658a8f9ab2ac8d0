#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <memory>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "gausslim/radial.hpp"
#include "gausslim/rng.hpp"

namespace gausslim {

/// Integrals over the closed ball |x| <= t.
struct TruncatedMoments {
  Eigen::MatrixXd second;  ///< int_{|x|<=t} x x^T
  Eigen::VectorXd first;   ///< int_{|x|<=t} x
  double tail_mass = 0.0;  ///< measure of {|x| > t}
  bool first_finite = true;
  bool tail_finite = true;
};

enum class MeasureKind { Empirical, RadialAnalytic, FiniteVarianceAnalytic, LinearImage };
std::string_view to_string(MeasureKind k) noexcept;

/// A probability measure on R^d. Immutable after construction.
class ProbMeasure {
 public:
  struct Empirical {
    Eigen::MatrixXd points;  // one row per point
    std::vector<double> weights;
    // prefix sums over points sorted by norm; row k holds the sums of the k
    // smallest points (second: d*d entries, first: d entries)
    std::vector<double> sorted_norms;
    std::vector<double> prefix_second;
    std::vector<double> prefix_first;
    std::vector<double> prefix_mass;
    std::vector<double> cumulative_weight;  // in row order, for sampling
  };
  struct Radial {
    RadialProfile profile;
    DirectionLaw direction;
    Eigen::VectorXd center;
    std::shared_ptr<const RadialSampler> sampler;
  };
  struct Box {
    Eigen::VectorXd lo, hi;
  };
  struct Gaussian {
    int dim;
    double sigma;
  };
  struct LinearImage {
    Eigen::MatrixXd map;  // d x m
    std::shared_ptr<const ProbMeasure> base;
    double conformal_scale;  // c with map^T map = c^2 I, or 0 when not conformal
  };

  static ProbMeasure empirical(Eigen::MatrixXd points, std::vector<double> weights = {});
  /// Radial law with radius density `profile` (mass per unit radius), direction law and
  /// an optional location shift. Total mass must be 1 within 1e-9.
  static ProbMeasure radial(RadialProfile profile, DirectionLaw direction,
                            Eigen::VectorXd center = {});
  /// Radial law from a Lebesgue density rho(|x|) with uniform direction in R^d:
  /// the radius density is rho(r) r^{d-1} |S^{d-1}|.
  static ProbMeasure radial_from_lebesgue(const PowerLawShape& rho, int dim,
                                          Eigen::VectorXd center = {});
  static ProbMeasure uniform_box(Eigen::VectorXd lo, Eigen::VectorXd hi);
  static ProbMeasure gaussian(int dim, double sigma = 1.0);
  static ProbMeasure linear_image(Eigen::MatrixXd map, ProbMeasure base);

  int dim() const noexcept { return dim_; }
  MeasureKind kind() const noexcept;
  const auto& repr() const noexcept { return repr_; }

  TruncatedMoments truncated(double t) const;
  bool finite_second_moment() const;
  bool finite_first_moment() const;

  /// n iid draws as rows. Identical (seed, label, n) give bit-identical output.
  Eigen::MatrixXd sample(std::size_t n, Seed seed, std::string_view label = "sample") const;

 private:
  explicit ProbMeasure(int dim) : dim_(dim) {}
  int dim_;
  std::variant<Empirical, Radial, Box, Gaussian, LinearImage> repr_;
  friend class PointSampler;
};

/// Per-thread drawing helper; holds scratch space so hot loops never allocate.
class PointSampler {
 public:
  explicit PointSampler(const ProbMeasure& m);
  void draw(Engine& eng, std::span<double> out);
  /// Adds the sum of n draws into `acc`.
  void accumulate(Engine& eng, std::size_t n, std::span<double> acc);

 private:
  const ProbMeasure& m_;
  std::vector<double> scratch_;
  std::vector<double> point_;
  std::unique_ptr<PointSampler> base_;
  std::normal_distribution<double> normal_;
};

/// A Levy measure on R^d with no atom at the origin and finite (|x|^2 ^ 1)-integral.
class LevyMeasure {
 public:
  struct Radial {
    RadialProfile profile;
    DirectionLaw direction;
  };
  struct Atoms {
    Eigen::MatrixXd points;  // one row per atom
    std::vector<double> masses;
  };
  struct LinearImage {
    Eigen::MatrixXd map;
    std::shared_ptr<const LevyMeasure> base;
    double conformal_scale;
  };

  static LevyMeasure radial(RadialProfile profile, DirectionLaw direction);
  /// Radial Levy measure from a Lebesgue density with uniform direction.
  static LevyMeasure radial_from_lebesgue(const RadialShape& rho, int dim);
  static LevyMeasure atoms(Eigen::MatrixXd points, std::vector<double> masses);
  /// The map must be conformal (map^T map = c^2 I, c > 0).
  static LevyMeasure linear_image(Eigen::MatrixXd map, LevyMeasure base);

  int dim() const noexcept { return dim_; }
  MeasureKind kind() const noexcept;
  const auto& repr() const noexcept { return repr_; }

  TruncatedMoments truncated(double t) const;
  /// int (|x|^2 ^ 1) M(dx).
  double levy_integral() const;
  /// int_{|x|>s} |x|^eta M(dx); +inf when divergent.
  double eta_tail_moment(double eta, double s) const;
  double tail_mass(double s) const { return eta_tail_moment(0.0, s); }
  /// int x * w(|x|) M(dx) for w(r) = 1{r <= cut} - 1/(1 + r^2).
  Eigen::VectorXd compensated_first_moment(double cut) const;
  /// Smallest and largest |x| over the support.
  double support_floor() const;
  double support_ceiling() const;

  /// D -> t M(D / a).
  LevyMeasure rescaled(double t, double a) const;

 private:
  explicit LevyMeasure(int dim) : dim_(dim) {}
  Eigen::VectorXd compensated_first_scaled(double scale, double cut) const;
  int dim_;
  std::variant<Atoms, Radial, LinearImage> repr_;
  friend class JumpSampler;
};

/// Largest dimension supported for linear images (stack scratch in hot loops).
inline constexpr int kMaxDim = 16;

/// Draws jumps of M restricted to |x| > cutoff, normalized.
class JumpSampler {
 public:
  JumpSampler(const LevyMeasure& m, double cutoff);
  double intensity() const noexcept { return intensity_; }
  int dim() const noexcept { return dim_; }
  void draw(Engine& eng, std::span<double> out) const;

 private:
  int dim_ = 0;
  double intensity_ = 0.0;
  const LevyMeasure* m_ = nullptr;
  std::shared_ptr<const RadialSampler> radial_;
  std::vector<std::size_t> atom_index_;
  std::vector<double> atom_cumulative_;
  std::unique_ptr<JumpSampler> base_;
};

/// Levy triplet (0, M, b); the Gaussian part is identically zero.
struct LevyTriplet {
  LevyMeasure measure;
  Eigen::VectorXd drift;

  LevyTriplet(LevyMeasure m, Eigen::VectorXd b);
  int dim() const noexcept { return measure.dim(); }
  Eigen::MatrixXd gaussian_part() const { return Eigen::MatrixXd::Zero(dim(), dim()); }
};

/// One point per row, d columns, optionally a trailing weight column.
ProbMeasure load_empirical_csv(std::istream& is, bool has_weight_column);
void write_points_csv(std::ostream& os, const Eigen::MatrixXd& points);

}  // namespace gausslim
