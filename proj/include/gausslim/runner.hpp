#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gausslim/scenario.hpp"

namespace gausslim {

struct RunOptions {
  std::filesystem::path out = "gausslim-out";
  std::optional<std::uint64_t> seed_override;
  int jobs = 1;
  std::ostream* log = nullptr;  ///< progress lines; null for silence
};

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ScenarioResult {
  std::string name;
  std::uint64_t seed = 0;
  bool pass = false;
  std::optional<std::string> error;           ///< set when a stage threw
  std::optional<std::string> scaling_skipped;  ///< reason, when no plan was built
  std::vector<CheckResult> checks;
  std::string manifest_sha256;
  double seconds = 0.0;
};

struct RunResult {
  std::vector<ScenarioResult> scenarios;
  bool all_pass() const;
};

/// Seed used for a scenario: the override, else the scenario's own, else the config's.
std::uint64_t effective_seed(const Scenario& s, const Config& c, const std::optional<std::uint64_t>& override_seed);

/// Runs one scenario and writes its artifacts into `dir`. Never throws for
/// failures inside the scenario; they are reported in the result.
ScenarioResult run_scenario(const Scenario& s, std::uint64_t seed, const std::filesystem::path& base_dir,
                            const std::filesystem::path& dir, std::ostream* log = nullptr);

/// Runs every scenario (up to `jobs` at once) and writes the run manifest.
RunResult run(const Config& c, const RunOptions& opts);

/// Human-readable summary of a scenario declaration.
std::string describe(const Scenario& s);

}  // namespace gausslim
