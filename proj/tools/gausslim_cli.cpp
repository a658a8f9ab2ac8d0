#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "gausslim/errors.hpp"
#include "gausslim/io.hpp"
#include "gausslim/runner.hpp"
#include "gausslim/scenario.hpp"

int main(int argc, char** argv) {
  using namespace gausslim;
  CLI::App app{"Multivariate Gaussian limit diagnostics and Monte Carlo checks"};
  app.set_version_flag("--version", std::string(io::kVersion));
  app.require_subcommand(1);

  std::string out = "gausslim-out";
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool quiet = false;

  auto* run_cmd = app.add_subcommand("run", "Run the scenarios of a config file (or builtin, builtin:<name>)");
  std::string config;
  run_cmd->add_option("config", config, "Config path, \"builtin\" or \"builtin:<name>\"")->required();
  run_cmd->add_option("--out", out, "Output directory")->capture_default_str();
  run_cmd->add_option("--seed", seed, "Override the config seed");
  run_cmd->add_option("--jobs", jobs, "Scenarios run concurrently")->check(CLI::PositiveNumber)->capture_default_str();
  run_cmd->add_flag("--quiet", quiet, "No progress output");

  auto* list_cmd = app.add_subcommand("list-scenarios", "List the built-in scenarios");
  auto* describe_cmd = app.add_subcommand("describe", "Show a built-in scenario");
  std::string name;
  describe_cmd->add_option("scenario", name, "Scenario name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list_cmd) {
      for (const auto& [n, d] : builtin_catalogue()) std::cout << n << "\t" << d << "\n";
      return 0;
    }
    if (*describe_cmd) {
      const auto s = find_builtin(name);
      if (!s) {
        std::cerr << "error: no built-in scenario named '" << name << "'\n";
        return 2;
      }
      std::cout << describe(*s);
      return 0;
    }
    const Config cfg = load_config(config);
    RunOptions opts;
    opts.out = out;
    opts.seed_override = seed;
    opts.jobs = jobs;
    opts.log = quiet ? nullptr : &std::cerr;
    const RunResult r = run(cfg, opts);
    for (const auto& s : r.scenarios) {
      std::cout << (s.pass ? "PASS " : "FAIL ") << s.name << "\n";
      for (const auto& c : s.checks) {
        std::cout << "  " << (c.pass ? "ok   " : "FAIL ") << c.name << ": " << c.detail << "\n";
      }
      if (s.scaling_skipped) std::cout << "  scaling skipped: " << *s.scaling_skipped << "\n";
    }
    return r.all_pass() ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error " << e.what() << "\n";
    return 2;
  }
}
