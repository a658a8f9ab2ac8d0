#pragma once

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gausslim/rng.hpp"

namespace gausslim {

// Radial building blocks shared by probability and Levy measures. A radial
// profile g(r) is the mass per unit radius, i.e. the law of |X| has g(r) dr.
// Every integral is taken in u = log r, where power-law and log-corrected
// densities are smooth over any number of decades.

/// g(r) = coef * r^-exponent on [r_min, r_max].
struct PowerLawShape {
  double coef = 1.0;
  double exponent = 0.0;
  double r_min = 0.0;
  double r_max = std::numeric_limits<double>::infinity();
};

/// g(r) = coef * r^-exponent * log(1/r)^-log_power on [r_min, r_max], r_max < 1.
struct LogCorrectedShape {
  double coef = 1.0;
  double exponent = 0.0;
  double log_power = 0.0;
  double r_min = 0.0;
  double r_max = 0.5;
};

/// Arbitrary profile given by u -> log g(e^u).
struct CustomShape {
  std::function<double(double)> log_density;
  double r_min = 0.0;
  double r_max = std::numeric_limits<double>::infinity();
  std::string label = "custom";
};

using RadialShape = std::variant<PowerLawShape, LogCorrectedShape, CustomShape>;

class RadialProfile {
 public:
  explicit RadialProfile(RadialShape shape);

  /// Profile of the image under r -> scale * r with mass multiplied by `mass_factor`.
  RadialProfile rescaled(double scale, double mass_factor) const;

  const RadialShape& shape() const noexcept { return shape_; }
  double log_scale() const noexcept { return log_scale_; }
  double log_mass() const noexcept { return log_mass_; }

  double r_min() const noexcept;
  double r_max() const noexcept;

  /// log g(e^u); -inf outside the support.
  double log_density(double u) const;
  double density(double r) const;

  /// Integral over [a, b] (clipped to the support) of r^k g(r) dr.
  double power_integral(double k, double a, double b) const;

  /// Integral over [a, b] of exp(log_weight(u)) g(e^u) e^u du, i.e. of w(r) g(r) dr
  /// for a positive weight given through its log as a function of u = log r.
  double weighted_integral(const std::function<double(double)>& log_weight, double a,
                           double b) const;

  /// Whether the integral of r^k g over the given open end converges.
  bool power_integral_converges(double k, bool toward_infinity) const;

  /// Integral of the kind power_integral but returning +inf when it diverges.
  double power_integral_or_inf(double k, double a, double b) const;

 private:
  RadialShape shape_;
  double log_scale_ = 0.0;
  double log_mass_ = 0.0;
};

/// Inverse-CDF sampler for the radius law restricted to [lower, r_max] and normalized.
class RadialSampler {
 public:
  RadialSampler(const RadialProfile& profile, double lower);

  double draw(Engine& eng) const;
  /// Total mass of the restriction (before normalization).
  double mass() const noexcept { return mass_; }
  double lower() const noexcept { return lower_; }

 private:
  // closed form for pure power laws
  bool analytic_ = false;
  double exponent_ = 0.0;
  double lo_ = 0.0, hi_ = 0.0;
  // tabulated tail masses otherwise
  std::vector<double> radii_;
  std::vector<double> tail_;     // mass above radii_[i]
  std::vector<double> cell_exp_;  // local power of the density per cell
  double beyond_exp_ = 0.0;       // tail exponent past the table
  double mass_ = 0.0;
  double lower_ = 0.0;
};

/// Distribution of the direction X/|X| on the unit sphere.
class DirectionLaw {
 public:
  struct Uniform {
    int dim;
  };
  struct Atoms {
    std::vector<Eigen::VectorXd> directions;
    std::vector<double> weights;
  };

  static DirectionLaw uniform(int dim);
  /// Atoms are normalized to unit length; weights to unit sum.
  static DirectionLaw atoms(std::vector<Eigen::VectorXd> directions, std::vector<double> weights);

  int dim() const noexcept { return dim_; }
  bool is_uniform() const noexcept { return std::holds_alternative<Uniform>(law_); }
  const std::variant<Uniform, Atoms>& law() const noexcept { return law_; }

  /// E[u u^T], closed form.
  Eigen::MatrixXd second_moment() const;
  /// E[u], closed form.
  Eigen::VectorXd mean() const;

  void draw(Engine& eng, std::span<double> out) const;

 private:
  DirectionLaw(int dim, std::variant<Uniform, Atoms> law);
  void build_cumulative();

  int dim_;
  std::variant<Uniform, Atoms> law_;
  std::vector<double> cumulative_;
};

/// Surface area of the unit sphere in R^d.
double sphere_area(int dim);

}  // namespace gausslim
