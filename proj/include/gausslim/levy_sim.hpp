#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gausslim/measures.hpp"
#include "gausslim/normalize.hpp"
#include "gausslim/rng.hpp"

namespace gausslim {

enum class SmallJumpMode { GaussianSubstitute, Discard };

struct SimConfig {
  std::optional<double> jump_cutoff;  ///< default: radius where M(|x| > eps) = jump_budget / t
  std::size_t n_paths = 10000;
  Seed seed;
  SmallJumpMode small_jump_mode = SmallJumpMode::GaussianSubstitute;
  double gate = 10.0;           ///< substitution needs sqrt(tr Sigma_eps) / eps >= gate
  double jump_budget = 1e3;     ///< expected jumps per path for the default cutoff
  double max_expected_jumps = 1e5;  ///< stop lowering eps past this many jumps per path
  std::string label = "levy";
};

/// Cutoff after applying the default rule and the substitution gate.
struct ResolvedCutoff {
  double epsilon = 0.0;
  double rate = 0.0;               ///< t * M(|x| > eps)
  Eigen::MatrixXd small_cov;       ///< t * int_{|x|<=eps} x x^T M
  Eigen::VectorXd drift;           ///< t * (b + int x (1{|x|<=eps} - 1/(1+|x|^2)) M)
  double gate_value = 0.0;         ///< sqrt(tr small_cov) / eps, +inf when there are no small jumps
  int halvings = 0;
  std::vector<std::string> warnings;
};

ResolvedCutoff resolve_cutoff(const LevyTriplet& triplet, double t, const SimConfig& cfg);

/// n_paths draws of X_t, one per row.
Eigen::MatrixXd simulate_marginal(const LevyTriplet& triplet, double t, const SimConfig& cfg,
                                  ResolvedCutoff* resolved = nullptr);

/// n_paths draws of a_t X_t - xi_t with (a_t, xi_t) from the plan.
Eigen::MatrixXd scaled_marginal(const LevyTriplet& triplet, const ScalingPlan& plan, double t,
                                const SimConfig& cfg, ResolvedCutoff* resolved = nullptr);

/// D -> t M(D / a).
LevyMeasure rescaled_measure(const LevyMeasure& m, double t, double a);

/// The family t -> M_t along a plan.
std::vector<LevyMeasure> rescaled_family(const LevyMeasure& m, const ScalingPlan& plan);

struct DecayPoint {
  double t;
  double value;
};

/// int_{|x|>s} |x|^eta M_t(dx) with M_t = t M(. / a_t) along the plan grid.
std::vector<DecayPoint> eta_moment_decay(const LevyMeasure& m, const ScalingPlan& plan, double eta, double s);

/// Drift of the accompanying law in the truncation convention at radius 1:
/// a_t t (b + int x (1{|x|<=1/a_t} - 1/(1+|x|^2)) M) - xi_t.
Eigen::VectorXd accompanying_drift(const LevyTriplet& triplet, const ScalingPlan& plan, std::size_t i);

void write_decay_csv(std::ostream& os, std::span<const DecayPoint> curve);

}  // namespace gausslim
