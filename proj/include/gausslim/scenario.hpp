#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gausslim/gof.hpp"
#include "gausslim/levy_sim.hpp"
#include "gausslim/measures.hpp"
#include "gausslim/regvar.hpp"

namespace gausslim {

struct RadiusGrid {
  double lo = 1.0;
  double hi = 1e6;
  int per_decade = 16;
  std::vector<double> points() const;
};

struct GofExpectation {
  double at = 0.0;
  std::optional<bool> pass;
  std::optional<double> cov_rel_max;
  std::optional<double> kernel_leak_max;
  std::optional<double> pvalue_min;
  std::optional<double> variance_ratio_tol;
};

struct Expectations {
  std::optional<bool> is_mrv0;
  std::optional<std::pair<double, double>> trace_index;
  std::optional<double> b_hat_distance_max;
  std::optional<int> rank;
  std::optional<bool> scaling_skipped;
  std::optional<double> centering_max;
  /// GOF discrepancy (cov_frobenius_rel for sums, |variance ratio - 1| for Levy
  /// marginals) strictly decreasing along the simulate list.
  std::optional<bool> gof_improving;
  std::vector<GofExpectation> gof;
};

enum class ScenarioType { Clt, Levy };

struct Scenario {
  std::string name;
  std::string description;
  ScenarioType type = ScenarioType::Clt;
  LimitPoint limit = LimitPoint::Infinity;
  nlohmann::json measure;  ///< measure (CLT) or triplet (Levy) declaration
  std::optional<Eigen::MatrixXd> target_b;
  RadiusGrid radii;
  std::vector<double> abscissae;  ///< n (CLT) or t (Levy) for the scaling plan
  std::vector<double> simulate;   ///< abscissae at which to simulate and test
  std::size_t replicates = 10000;
  GofOptions gof;
  SimConfig sim;  ///< seed and label are filled in at run time
  std::vector<std::pair<double, double>> decay;  ///< (eta, s)
  bool centering_check = false;
  std::optional<double> centering_at;  ///< radius for the centering verdict; default the last radius
  std::optional<std::uint64_t> seed;
  Expectations expect;
};

struct Config {
  std::uint64_t seed = 0;
  std::vector<Scenario> scenarios;
  std::filesystem::path base_dir;  ///< for relative CSV paths
};

/// Throws Errc::ConfigInvalid naming the offending field.
Config parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
Scenario parse_scenario(const nlohmann::json& j, const std::string& path = "scenario");

/// Accepts a file path, "builtin" (all built-ins) or "builtin:<name>".
Config load_config(const std::string& source);

nlohmann::json to_json(const Scenario& s);
nlohmann::json to_json(const Config& c);

/// The built-in acceptance scenarios as a full config.
nlohmann::json builtin_config_json();
std::vector<std::pair<std::string, std::string>> builtin_catalogue();
std::optional<Scenario> find_builtin(const std::string& name);

ProbMeasure build_prob_measure(const nlohmann::json& decl, const std::filesystem::path& base_dir = {});
LevyMeasure build_levy_measure(const nlohmann::json& decl);
LevyTriplet build_triplet(const nlohmann::json& decl);

}  // namespace gausslim
