#include "gausslim/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "gausslim/detail/format.hpp"
#include "gausslim/errors.hpp"
#include "gausslim/gof.hpp"
#include "gausslim/io.hpp"
#include "gausslim/kernels.hpp"
#include "gausslim/levy_sim.hpp"
#include "gausslim/moment_matrix.hpp"
#include "gausslim/normalize.hpp"

namespace gausslim {

using Json = nlohmann::json;
using detail::num;

namespace {

std::mutex log_mutex;

void log_line(std::ostream* log, const std::string& scenario, const std::string& msg) {
  if (!log) return;
  std::lock_guard<std::mutex> lock(log_mutex);
  *log << "[" << scenario << "] " << msg << '\n' << std::flush;
}

std::string csv_of(const auto& writer) {
  std::ostringstream os;
  writer(os);
  return os.str();
}

// Artifacts accumulate here and are written at the end so a failing stage
// still leaves a consistent directory.
struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;
  void add(std::string name, std::string content) { files.emplace_back(std::move(name), std::move(content)); }
};

void check(ScenarioResult& r, std::string name, bool pass, std::string detail) {
  r.checks.push_back({std::move(name), pass, std::move(detail)});
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Gaussian discrepancy used for the "improving" expectation.
double gof_discrepancy(const Scenario& s, const GofReport& g) {
  return s.type == ScenarioType::Clt ? g.cov_frobenius_rel : std::abs(g.variance_ratio - 1.0);
}

}  // namespace

bool RunResult::all_pass() const {
  return std::all_of(scenarios.begin(), scenarios.end(), [](const ScenarioResult& r) { return r.pass; });
}

std::uint64_t effective_seed(const Scenario& s, const Config& c, const std::optional<std::uint64_t>& override_seed) {
  if (override_seed) return *override_seed;
  return s.seed.value_or(c.seed);
}

ScenarioResult run_scenario(const Scenario& s, std::uint64_t seed_value, const std::filesystem::path& base_dir,
                            const std::filesystem::path& dir, std::ostream* log) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioResult res;
  res.name = s.name;
  res.seed = seed_value;
  const Seed seed{seed_value};
  Artifacts art;
  Json mrv_json;
  std::string gof_csv = io::gof_summary_header();
  std::vector<std::pair<double, GofReport>> gofs;
  std::optional<MRVReport> mrv;
  std::optional<double> centering_final;
  double centering_radius = 0.0;

  try {
    const auto radii = s.radii.points();
    std::optional<ProbMeasure> measure;
    std::optional<LevyTriplet> triplet;
    MomentCurve curve;
    if (s.type == ScenarioType::Clt) {
      measure = build_prob_measure(s.measure, base_dir);
      curve = build_curve(*measure, radii, CurveForm::CltCentered);
    } else {
      triplet = build_triplet(s.measure);
      curve = build_curve(triplet->measure, radii);
    }
    art.add("curve.csv", csv_of([&](std::ostream& os) { write_curve_csv(os, curve); }));
    log_line(log, s.name, "moment curve on " + std::to_string(radii.size()) + " radii");

    mrv = mrv_diagnose(curve, s.limit, s.target_b);
    mrv_json = io::to_json(*mrv);
    log_line(log, s.name, std::string("is_mrv0 = ") + (mrv->is_mrv0 ? "true" : "false") +
                              ", trace index " + fmt(mrv->trace_diagnosis.index_estimate));

    if (s.centering_check) {
      if (!measure) throw Error(Errc::InvalidArgument, "centering_check needs a probability measure");
      const CenteringComparison cc = centered_uncentered_compare(*measure, radii);
      art.add("centering.csv", csv_of([&](std::ostream& os) {
                os << "t,discrepancy\n";
                for (std::size_t i = 0; i < cc.radii.size(); ++i) os << num(cc.radii[i]) << ',' << num(cc.discrepancy[i]) << '\n';
              }));
      std::size_t at = cc.radii.size() - 1;
      if (s.centering_at) {
        for (std::size_t i = 0; i < cc.radii.size(); ++i) {
          if (std::abs(std::log(cc.radii[i] / *s.centering_at)) < std::abs(std::log(cc.radii[at] / *s.centering_at))) at = i;
        }
      }
      centering_final = cc.discrepancy[at];
      centering_radius = cc.radii[at];
    }

    if (!mrv->is_mrv0) {
      std::ostringstream why;
      why << "trace index " << fmt(mrv->trace_diagnosis.index_estimate) << " is not slowly varying toward "
          << to_string(s.limit) << "; no Gaussian normalization exists";
      res.scaling_skipped = why.str();
      mrv_json["scaling"] = {{"skipped", true}, {"reason", *res.scaling_skipped}};
      art.add("plan.csv", "abscissa,a\n");
      log_line(log, s.name, "scaling skipped: " + *res.scaling_skipped);
    } else {
      const double k = s.target_b ? 1.0 / s.target_b->trace() : 1.0;
      const Eigen::MatrixXd b = s.target_b ? *s.target_b : Eigen::MatrixXd(mrv->b_hat / k);
      const ScalingPlan plan = measure ? clt_scaling(*measure, curve, *mrv, k, s.abscissae)
                                       : levy_scaling(*triplet, curve, *mrv, k, s.abscissae);
      mrv_json["scaling"] = {{"skipped", false},
                             {"branch", std::string(to_string(plan.branch))},
                             {"formula", plan.formula},
                             {"k", plan.k_used},
                             {"limit_B", io::matrix_json(b)},
                             {"warnings", plan.warnings}};
      art.add("plan.csv", csv_of([&](std::ostream& os) { write_plan_csv(os, plan); }));

      Json sim_json = Json::array();
      for (double x : s.simulate) {
        const std::size_t i = plan.index_of(x);
        Eigen::MatrixXd samples;
        if (measure) {
          kernels::SumJob job;
          job.measure = &*measure;
          job.summands = static_cast<std::size_t>(x);
          job.replicates = s.replicates;
          job.a = plan.a[i];
          job.xi = plan.xi[i];
          job.seed = seed;
          job.label = "sums/n=" + num(x);
          samples = kernels::normalized_sums_omp(job);
        } else {
          SimConfig cfg = s.sim;
          cfg.n_paths = s.replicates;
          cfg.seed = seed;
          cfg.label = "levy";
          ResolvedCutoff rc;
          samples = scaled_marginal(*triplet, plan, x, cfg, &rc);
          sim_json.push_back({{"t", x},
                              {"epsilon", rc.epsilon},
                              {"rate", rc.rate},
                              {"gate_value", rc.gate_value},
                              {"halvings", rc.halvings},
                              {"warnings", rc.warnings}});
        }
        const Seed gof_seed{splitmix64(seed.value ^ bits_of(x))};
        const GofReport g = gaussian_gof(samples, b, gof_seed, s.gof);
        gof_csv += io::gof_summary_row(s.name, x, g);
        gofs.emplace_back(x, g);
        log_line(log, s.name, "gof at " + num(x) + ": cov_rel " + fmt(g.cov_frobenius_rel) + ", variance ratio " +
                                  fmt(g.variance_ratio) + ", energy p " + fmt(g.energy_pvalue) +
                                  (g.pass ? " (pass)" : " (fail)"));
      }
      if (!sim_json.empty()) mrv_json["simulation"] = sim_json;

      for (const auto& [eta, r] : s.decay) {
        if (!triplet) throw Error(Errc::InvalidArgument, "decay curves need a Levy triplet");
        const auto curve_d = eta_moment_decay(triplet->measure, plan, eta, r);
        art.add("decay_eta" + num(eta) + "_s" + num(r) + ".csv",
                csv_of([&](std::ostream& os) { write_decay_csv(os, curve_d); }));
      }
    }
  } catch (const std::exception& e) {
    res.error = e.what();
    log_line(log, s.name, std::string("error: ") + e.what());
  }

  // Expectations.
  const Expectations& ex = s.expect;
  if (res.error) check(res, "no-error", false, *res.error);
  if (ex.is_mrv0) {
    check(res, "is_mrv0", mrv && mrv->is_mrv0 == *ex.is_mrv0,
          mrv ? std::string("got ") + (mrv->is_mrv0 ? "true" : "false") : "not computed");
  }
  if (ex.trace_index) {
    const bool ok = mrv && mrv->trace_diagnosis.index_estimate >= ex.trace_index->first &&
                    mrv->trace_diagnosis.index_estimate <= ex.trace_index->second;
    check(res, "trace_index", ok, mrv ? "got " + fmt(mrv->trace_diagnosis.index_estimate) : "not computed");
  }
  if (ex.b_hat_distance_max) {
    const bool ok = mrv && mrv->target_distance && *mrv->target_distance <= *ex.b_hat_distance_max;
    check(res, "b_hat_distance", ok, mrv && mrv->target_distance ? "got " + fmt(*mrv->target_distance) : "not computed");
  }
  if (ex.rank) check(res, "rank", mrv && mrv->rank == *ex.rank, mrv ? "got " + std::to_string(mrv->rank) : "not computed");
  if (ex.scaling_skipped) {
    check(res, "scaling_skipped", mrv && res.scaling_skipped.has_value() == *ex.scaling_skipped,
          res.scaling_skipped.value_or("scaling built"));
  }
  if (ex.centering_max) {
    check(res, "centering", centering_final && *centering_final <= *ex.centering_max,
          centering_final ? "discrepancy " + fmt(*centering_final) + " at t = " + fmt(centering_radius) : "not computed");
  }
  for (const GofExpectation& ge : ex.gof) {
    auto it = std::find_if(gofs.begin(), gofs.end(), [&](const auto& p) { return p.first == ge.at; });
    const std::string at = "@" + num(ge.at);
    if (it == gofs.end()) {
      check(res, "gof" + at, false, "no simulation at this abscissa");
      continue;
    }
    const GofReport& g = it->second;
    if (ge.pass) check(res, "gof_pass" + at, g.pass == *ge.pass, std::string("got ") + (g.pass ? "true" : "false"));
    if (ge.cov_rel_max) check(res, "cov_rel" + at, g.cov_frobenius_rel < *ge.cov_rel_max, "got " + fmt(g.cov_frobenius_rel));
    if (ge.kernel_leak_max) {
      const double tr = s.target_b ? s.target_b->trace() : 1.0;
      check(res, "kernel_leak" + at, g.kernel_leak < *ge.kernel_leak_max * tr, "got " + fmt(g.kernel_leak));
    }
    if (ge.pvalue_min) check(res, "energy_pvalue" + at, g.energy_pvalue > *ge.pvalue_min, "got " + fmt(g.energy_pvalue));
    if (ge.variance_ratio_tol) {
      check(res, "variance_ratio" + at, std::abs(g.variance_ratio - 1.0) <= *ge.variance_ratio_tol,
            "got " + fmt(g.variance_ratio));
    }
  }
  if (ex.gof_improving) {
    bool ok = gofs.size() >= 2;
    std::string detail;
    for (std::size_t i = 0; i < gofs.size(); ++i) {
      const double d = gof_discrepancy(s, gofs[i].second);
      if (i > 0 && !(d < gof_discrepancy(s, gofs[i - 1].second))) ok = false;
      detail += (i ? " " : "") + fmt(d);
    }
    check(res, "gof_improving", ok == *ex.gof_improving, detail.empty() ? "no simulations" : detail);
  }
  res.pass = !res.error && std::all_of(res.checks.begin(), res.checks.end(), [](const CheckResult& c) { return c.pass; });

  // Artifacts. Only scenario content and the seed enter the manifest, so it is
  // unaffected by other scenarios or wall-clock time.
  Json checks = Json::array();
  for (const auto& c : res.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  mrv_json["checks"] = checks;
  if (res.error) mrv_json["error"] = *res.error;
  art.add("mrv.json", mrv_json.dump(2) + "\n");
  art.add("gof_summary.csv", gof_csv);
  if (std::none_of(art.files.begin(), art.files.end(), [](const auto& f) { return f.first == "curve.csv"; })) {
    art.add("curve.csv", "t,U,raw_trace,tail_mass\n");
  }
  if (std::none_of(art.files.begin(), art.files.end(), [](const auto& f) { return f.first == "plan.csv"; })) {
    art.add("plan.csv", "abscissa,a\n");
  }
  std::sort(art.files.begin(), art.files.end());

  const std::string scenario_text = to_json(s).dump();
  Json files = Json::object();
  for (const auto& [name, content] : art.files) files[name] = io::sha256_hex(content);
  Json manifest{{"scenario", s.name},
                {"config_dialect", std::string(io::kConfigDialect)},
                {"config_sha256", io::sha256_hex(scenario_text + "\nseed=" + std::to_string(seed_value))},
                {"seed", seed_value},
                {"pass", res.pass},
                {"files", files},
                {"versions", io::build_info()}};
  const std::string manifest_text = manifest.dump(2) + "\n";
  res.manifest_sha256 = io::sha256_hex(manifest_text);
  try {
    std::filesystem::create_directories(dir);
    for (const auto& [name, content] : art.files) io::write_file(dir / name, content);
    io::write_file(dir / "scenario.json", to_json(s).dump(2) + "\n");
    io::write_file(dir / "manifest.json", manifest_text);
  } catch (const std::exception& e) {
    res.error = res.error.value_or(std::string("artifact write failed: ") + e.what());
    res.pass = false;
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  log_line(log, s.name, std::string(res.pass ? "PASS" : "FAIL") + " in " + fmt(res.seconds) + " s");
  return res;
}

RunResult run(const Config& c, const RunOptions& opts) {
  RunResult out;
  out.scenarios.resize(c.scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < c.scenarios.size(); i = next++) {
      const Scenario& s = c.scenarios[i];
      out.scenarios[i] = run_scenario(s, effective_seed(s, c, opts.seed_override), c.base_dir, opts.out / s.name, opts.log);
    }
  };
  const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(c.scenarios.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  Config effective = c;
  if (opts.seed_override) effective.seed = *opts.seed_override;
  Json scen = Json::array();
  for (const auto& r : out.scenarios) {
    Json checks = Json::array();
    for (const auto& ch : r.checks) checks.push_back({{"name", ch.name}, {"pass", ch.pass}, {"detail", ch.detail}});
    scen.push_back({{"name", r.name},
                    {"seed", r.seed},
                    {"pass", r.pass},
                    {"manifest_sha256", r.manifest_sha256},
                    {"checks", checks}});
  }
  Json manifest{{"config_dialect", std::string(io::kConfigDialect)},
                {"config_sha256", io::sha256_hex(to_json(effective).dump())},
                {"seed", effective.seed},
                {"pass", out.all_pass()},
                {"scenarios", scen},
                {"versions", io::build_info()}};
  std::filesystem::create_directories(opts.out);
  io::write_file(opts.out / "manifest.json", manifest.dump(2) + "\n");
  io::write_file(opts.out / "config.json", to_json(effective).dump(2) + "\n");
  return out;
}

std::string describe(const Scenario& s) {
  std::ostringstream os;
  os << s.name << "\n  " << s.description << "\n";
  os << "  type: " << (s.type == ScenarioType::Clt ? "iid sums" : "Levy marginals")
     << ", limit point: " << to_string(s.limit) << "\n";
  os << "  radii: [" << s.radii.lo << ", " << s.radii.hi << "], " << s.radii.per_decade << " per decade\n";
  os << "  abscissae:";
  for (double x : s.abscissae) os << ' ' << x;
  os << "\n  simulate:";
  for (double x : s.simulate) os << ' ' << x;
  if (s.simulate.empty()) os << " none";
  os << " (" << s.replicates << " replicates)\n";
  os << "declaration:\n" << to_json(s).dump(2) << "\n";
  return os.str();
}

}  // namespace gausslim
