#include "gausslim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gausslim/errors.hpp"
#include "gausslim/io.hpp"

namespace gausslim {

using Json = nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& reason) {
  throw Error(Errc::ConfigInvalid, field + ": " + reason);
}

const Json& require(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) invalid(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) invalid(path + "." + key, "missing required field");
  return *it;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) invalid(path, "expected a number");
  return j.get<double>();
}

double number_or(const Json& j, const char* key, const std::string& path, double fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : number(*it, path + "." + key);
}

std::string string_of(const Json& j, const std::string& path) {
  if (!j.is_string()) invalid(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> numbers(const Json& j, const std::string& path) {
  if (!j.is_array()) invalid(path, "expected an array of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

Eigen::VectorXd vector_of(const Json& j, const std::string& path) {
  const auto v = numbers(j, path);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd matrix_of(const Json& j, const std::string& path) {
  try {
    return io::matrix_from_json(j);
  } catch (const Error& e) {
    invalid(path, e.what());
  }
}

int positive_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 1) invalid(path, "expected a positive integer");
  return j.get<int>();
}

// Radius profile from a shape declaration. `lebesgue` converts a density in
// |x| to a density in the radius for dimension d.
RadialShape parse_shape(const Json& j, const std::string& path, bool lebesgue, int dim, bool normalize_allowed) {
  const std::string kind = string_of(require(j, "kind", path), path + ".kind");
  const double area = lebesgue ? sphere_area(dim) : 1.0;
  const double shift = lebesgue ? dim - 1 : 0.0;
  const bool auto_coef = j.contains("coef") && j["coef"].is_string();
  if (auto_coef && (!normalize_allowed || j["coef"].get<std::string>() != "auto")) {
    invalid(path + ".coef", "only probability measures accept \"auto\"");
  }
  const double coef = auto_coef ? 1.0 : number_or(j, "coef", path, 1.0);
  RadialShape shape;
  if (kind == "power_law") {
    PowerLawShape p;
    p.coef = coef * area;
    p.exponent = number(require(j, "exponent", path), path + ".exponent") - shift;
    p.r_min = number_or(j, "r_min", path, 0.0);
    p.r_max = number_or(j, "r_max", path, std::numeric_limits<double>::infinity());
    shape = p;
  } else if (kind == "log_corrected") {
    LogCorrectedShape p;
    p.coef = coef * area;
    p.exponent = number(require(j, "exponent", path), path + ".exponent") - shift;
    p.log_power = number(require(j, "log_power", path), path + ".log_power");
    p.r_min = number_or(j, "r_min", path, 0.0);
    p.r_max = number(require(j, "r_max", path), path + ".r_max");
    shape = p;
  } else {
    invalid(path + ".kind", "unknown shape '" + kind + "' (power_law, log_corrected)");
  }
  if (auto_coef) {
    RadialProfile prof(shape);
    const double mass = prof.power_integral_or_inf(0.0, 0.0, std::numeric_limits<double>::infinity());
    if (!std::isfinite(mass) || !(mass > 0)) invalid(path, "profile mass is not finite");
    std::visit([mass](auto& s) {
      if constexpr (!std::is_same_v<std::decay_t<decltype(s)>, CustomShape>) s.coef /= mass;
    }, shape);
  }
  return shape;
}

DirectionLaw parse_direction(const Json& j, const std::string& path, int dim) {
  if (j.is_string()) {
    if (j.get<std::string>() != "uniform") invalid(path, "expected \"uniform\" or an atom list");
    return DirectionLaw::uniform(dim);
  }
  const Json& atoms = require(j, "atoms", path);
  if (!atoms.is_array() || atoms.empty()) invalid(path + ".atoms", "expected a nonempty array");
  std::vector<Eigen::VectorXd> dirs;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    dirs.push_back(vector_of(atoms[i], path + ".atoms[" + std::to_string(i) + "]"));
    if (dirs.back().size() != dim) invalid(path + ".atoms", "atom dimension differs from dim");
  }
  std::vector<double> w = j.contains("weights") ? numbers(j["weights"], path + ".weights")
                                                : std::vector<double>(dirs.size(), 1.0);
  try {
    return DirectionLaw::atoms(std::move(dirs), std::move(w));
  } catch (const Error& e) {
    invalid(path, e.what());
  }
}

ProbMeasure prob_measure(const Json& j, const std::string& path, const std::filesystem::path& base) {
  const std::string type = string_of(require(j, "type", path), path + ".type");
  try {
    if (type == "uniform_box") {
      return ProbMeasure::uniform_box(vector_of(require(j, "lo", path), path + ".lo"),
                                      vector_of(require(j, "hi", path), path + ".hi"));
    }
    if (type == "gaussian") {
      return ProbMeasure::gaussian(positive_int(require(j, "dim", path), path + ".dim"),
                                   number_or(j, "sigma", path, 1.0));
    }
    if (type == "radial") {
      const int dim = positive_int(require(j, "dim", path), path + ".dim");
      const std::string density = j.contains("density") ? string_of(j["density"], path + ".density") : "lebesgue";
      if (density != "lebesgue" && density != "radius") invalid(path + ".density", "expected lebesgue or radius");
      const bool leb = density == "lebesgue";
      RadialShape shape = parse_shape(require(j, "shape", path), path + ".shape", leb, dim, true);
      DirectionLaw dir = j.contains("direction") ? parse_direction(j["direction"], path + ".direction", dim)
                                                 : DirectionLaw::uniform(dim);
      if (leb && !dir.is_uniform() && dim > 1) invalid(path + ".direction", "lebesgue densities need uniform direction");
      Eigen::VectorXd center = j.contains("center") ? vector_of(j["center"], path + ".center") : Eigen::VectorXd();
      return ProbMeasure::radial(RadialProfile(std::move(shape)), std::move(dir), std::move(center));
    }
    if (type == "linear_image") {
      return ProbMeasure::linear_image(matrix_of(require(j, "map", path), path + ".map"),
                                       prob_measure(require(j, "base", path), path + ".base", base));
    }
    if (type == "empirical") {
      std::filesystem::path p = string_of(require(j, "csv", path), path + ".csv");
      if (p.is_relative()) p = base / p;
      std::ifstream is(p);
      if (!is) invalid(path + ".csv", "cannot open " + p.string());
      const bool w = j.contains("weights") && j["weights"].is_boolean() && j["weights"].get<bool>();
      return load_empirical_csv(is, w);
    }
  } catch (const Error& e) {
    if (e.code() == Errc::ConfigInvalid) throw;
    invalid(path, e.what());
  }
  invalid(path + ".type", "unknown measure type '" + type + "'");
}

LevyMeasure levy_measure(const Json& j, const std::string& path) {
  const std::string type = string_of(require(j, "type", path), path + ".type");
  try {
    if (type == "radial") {
      const int dim = positive_int(require(j, "dim", path), path + ".dim");
      const std::string density = j.contains("density") ? string_of(j["density"], path + ".density") : "lebesgue";
      if (density != "lebesgue" && density != "radius") invalid(path + ".density", "expected lebesgue or radius");
      const bool leb = density == "lebesgue";
      RadialShape shape = parse_shape(require(j, "shape", path), path + ".shape", leb, dim, false);
      DirectionLaw dir = j.contains("direction") ? parse_direction(j["direction"], path + ".direction", dim)
                                                 : DirectionLaw::uniform(dim);
      return LevyMeasure::radial(RadialProfile(std::move(shape)), std::move(dir));
    }
    if (type == "atoms") {
      return LevyMeasure::atoms(matrix_of(require(j, "points", path), path + ".points"),
                                numbers(require(j, "masses", path), path + ".masses"));
    }
    if (type == "linear_image") {
      return LevyMeasure::linear_image(matrix_of(require(j, "map", path), path + ".map"),
                                       levy_measure(require(j, "base", path), path + ".base"));
    }
  } catch (const Error& e) {
    if (e.code() == Errc::ConfigInvalid) throw;
    invalid(path, e.what());
  }
  invalid(path + ".type", "unknown Levy measure type '" + type + "'");
}

LevyTriplet triplet(const Json& j, const std::string& path) {
  LevyMeasure m = levy_measure(require(j, "measure", path), path + ".measure");
  Eigen::VectorXd b = j.contains("drift") ? vector_of(j["drift"], path + ".drift") : Eigen::VectorXd();
  if (b.size() != 0 && b.size() != m.dim()) invalid(path + ".drift", "dimension differs from the measure");
  return LevyTriplet(std::move(m), std::move(b));
}

}  // namespace

std::vector<double> RadiusGrid::points() const { return log_grid(lo, hi, per_decade); }

ProbMeasure build_prob_measure(const Json& decl, const std::filesystem::path& base_dir) {
  return prob_measure(decl, "measure", base_dir);
}

LevyMeasure build_levy_measure(const Json& decl) { return levy_measure(decl, "measure"); }

LevyTriplet build_triplet(const Json& decl) { return triplet(decl, "triplet"); }

Scenario parse_scenario(const Json& j, const std::string& path) {
  Scenario s;
  s.name = string_of(require(j, "name", path), path + ".name");
  if (s.name.empty() || s.name.find('/') != std::string::npos) invalid(path + ".name", "must be a nonempty file-safe name");
  if (j.contains("description")) s.description = string_of(j["description"], path + ".description");
  const std::string type = string_of(require(j, "type", path), path + ".type");
  if (type == "clt") {
    s.type = ScenarioType::Clt;
    s.measure = require(j, "measure", path);
  } else if (type == "levy") {
    s.type = ScenarioType::Levy;
    s.measure = require(j, "triplet", path);
  } else {
    invalid(path + ".type", "expected clt or levy");
  }
  try {
    s.limit = limit_point_from_string(string_of(require(j, "limit_point", path), path + ".limit_point"));
  } catch (const Error& e) {
    if (e.code() == Errc::ConfigInvalid) throw;
    invalid(path + ".limit_point", e.what());
  }
  if (s.type == ScenarioType::Clt && s.limit != LimitPoint::Infinity) {
    invalid(path + ".limit_point", "sums of iid vectors are studied at infinity");
  }
  if (j.contains("target_B") && !j["target_B"].is_null()) s.target_b = matrix_of(j["target_B"], path + ".target_B");

  const Json& r = require(j, "radii", path);
  s.radii.lo = number(require(r, "lo", path + ".radii"), path + ".radii.lo");
  s.radii.hi = number(require(r, "hi", path + ".radii"), path + ".radii.hi");
  if (r.contains("per_decade")) s.radii.per_decade = positive_int(r["per_decade"], path + ".radii.per_decade");
  if (!(s.radii.lo > 0) || !(s.radii.hi > s.radii.lo)) invalid(path + ".radii", "need 0 < lo < hi");

  s.abscissae = numbers(require(j, "abscissae", path), path + ".abscissae");
  if (s.abscissae.empty()) invalid(path + ".abscissae", "grid must be nonempty");
  for (double x : s.abscissae) {
    if (!(x > 0)) invalid(path + ".abscissae", "entries must be positive");
  }
  if (j.contains("simulate")) s.simulate = numbers(j["simulate"], path + ".simulate");
  for (double x : s.simulate) {
    if (std::find(s.abscissae.begin(), s.abscissae.end(), x) == s.abscissae.end()) {
      invalid(path + ".simulate", "every entry must appear in abscissae");
    }
    if (s.type == ScenarioType::Clt && (x < 1 || x != std::floor(x))) {
      invalid(path + ".simulate", "sample counts must be positive integers");
    }
  }
  if (j.contains("replicates")) s.replicates = static_cast<std::size_t>(positive_int(j["replicates"], path + ".replicates"));

  if (j.contains("gof")) {
    const Json& g = j["gof"];
    const std::string p = path + ".gof";
    s.gof.alpha = number_or(g, "alpha", p, s.gof.alpha);
    s.gof.tol_cov = number_or(g, "tol_cov", p, s.gof.tol_cov);
    s.gof.tol_kernel_rel = number_or(g, "tol_kernel_rel", p, s.gof.tol_kernel_rel);
    s.gof.tol_mean_rel = number_or(g, "tol_mean_rel", p, s.gof.tol_mean_rel);
    s.gof.rank_tol = number_or(g, "rank_tol", p, s.gof.rank_tol);
    if (g.contains("permutations")) s.gof.permutations = static_cast<std::size_t>(positive_int(g["permutations"], p + ".permutations"));
    if (g.contains("energy_max_points")) {
      s.gof.energy_max_points = static_cast<std::size_t>(positive_int(g["energy_max_points"], p + ".energy_max_points"));
    }
  }
  if (j.contains("sim")) {
    const Json& g = j["sim"];
    const std::string p = path + ".sim";
    if (g.contains("jump_cutoff") && !g["jump_cutoff"].is_null()) s.sim.jump_cutoff = number(g["jump_cutoff"], p + ".jump_cutoff");
    s.sim.gate = number_or(g, "gate", p, s.sim.gate);
    s.sim.jump_budget = number_or(g, "jump_budget", p, s.sim.jump_budget);
    s.sim.max_expected_jumps = number_or(g, "max_expected_jumps", p, s.sim.max_expected_jumps);
    if (g.contains("small_jump_mode")) {
      const std::string m = string_of(g["small_jump_mode"], p + ".small_jump_mode");
      if (m == "gaussian_substitute") {
        s.sim.small_jump_mode = SmallJumpMode::GaussianSubstitute;
      } else if (m == "discard") {
        s.sim.small_jump_mode = SmallJumpMode::Discard;
      } else {
        invalid(p + ".small_jump_mode", "expected gaussian_substitute or discard");
      }
    }
  }
  if (j.contains("decay")) {
    const Json& d = j["decay"];
    if (!d.is_array()) invalid(path + ".decay", "expected an array");
    for (std::size_t i = 0; i < d.size(); ++i) {
      const std::string p = path + ".decay[" + std::to_string(i) + "]";
      s.decay.emplace_back(number(require(d[i], "eta", p), p + ".eta"), number(require(d[i], "s", p), p + ".s"));
    }
  }
  if (j.contains("centering_check")) {
    if (!j["centering_check"].is_boolean()) invalid(path + ".centering_check", "expected a boolean");
    s.centering_check = j["centering_check"].get<bool>();
  }
  if (j.contains("centering_at") && !j["centering_at"].is_null()) {
    s.centering_at = number(j["centering_at"], path + ".centering_at");
    if (!(*s.centering_at >= s.radii.lo && *s.centering_at <= s.radii.hi)) {
      invalid(path + ".centering_at", "must lie inside the radius grid");
    }
  }
  if (j.contains("seed") && !j["seed"].is_null()) {
    if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0) invalid(path + ".seed", "expected a nonnegative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("expect")) {
    const Json& e = j["expect"];
    const std::string p = path + ".expect";
    if (!e.is_object()) invalid(p, "expected an object");
    auto flag = [&](const char* key, std::optional<bool>& out) {
      if (e.contains(key)) {
        if (!e[key].is_boolean()) invalid(p + "." + key, "expected a boolean");
        out = e[key].get<bool>();
      }
    };
    flag("is_mrv0", s.expect.is_mrv0);
    flag("scaling_skipped", s.expect.scaling_skipped);
    flag("gof_improving", s.expect.gof_improving);
    if (e.contains("trace_index")) {
      const auto v = numbers(e["trace_index"], p + ".trace_index");
      if (v.size() != 2 || v[0] > v[1]) invalid(p + ".trace_index", "expected [lo, hi]");
      s.expect.trace_index = std::make_pair(v[0], v[1]);
    }
    if (e.contains("b_hat_distance_max")) {
      s.expect.b_hat_distance_max = number(e["b_hat_distance_max"], p + ".b_hat_distance_max");
      if (!s.target_b) invalid(p + ".b_hat_distance_max", "needs target_B");
    }
    if (e.contains("rank")) s.expect.rank = positive_int(e["rank"], p + ".rank");
    if (e.contains("centering_max")) s.expect.centering_max = number(e["centering_max"], p + ".centering_max");
    if (e.contains("gof")) {
      const Json& g = e["gof"];
      if (!g.is_array()) invalid(p + ".gof", "expected an array");
      for (std::size_t i = 0; i < g.size(); ++i) {
        const std::string q = p + ".gof[" + std::to_string(i) + "]";
        GofExpectation ge;
        ge.at = number(require(g[i], "at", q), q + ".at");
        if (std::find(s.simulate.begin(), s.simulate.end(), ge.at) == s.simulate.end()) {
          invalid(q + ".at", "not in the simulate list");
        }
        if (g[i].contains("pass")) {
          if (!g[i]["pass"].is_boolean()) invalid(q + ".pass", "expected a boolean");
          ge.pass = g[i]["pass"].get<bool>();
        }
        auto opt = [&](const char* key, std::optional<double>& out) {
          if (g[i].contains(key)) out = number(g[i][key], q + "." + key);
        };
        opt("cov_rel_max", ge.cov_rel_max);
        opt("kernel_leak_max", ge.kernel_leak_max);
        opt("pvalue_min", ge.pvalue_min);
        opt("variance_ratio_tol", ge.variance_ratio_tol);
        s.expect.gof.push_back(ge);
      }
    }
  }
  return s;
}

Config parse_config(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) invalid("config", "expected an object");
  Config c;
  c.base_dir = base_dir;
  const Json& seed = require(j, "seed", "config");
  if (!seed.is_number_integer() || seed.get<long long>() < 0) invalid("config.seed", "expected a nonnegative integer");
  c.seed = seed.get<std::uint64_t>();
  const Json& sc = require(j, "scenarios", "config");
  if (!sc.is_array() || sc.empty()) invalid("config.scenarios", "expected a nonempty array");
  std::set<std::string> names;
  for (std::size_t i = 0; i < sc.size(); ++i) {
    const std::string path = "config.scenarios[" + std::to_string(i) + "]";
    c.scenarios.push_back(parse_scenario(sc[i], path));
    // build the declared measure once so malformed declarations fail here
    const Scenario& last = c.scenarios.back();
    if (last.type == ScenarioType::Clt) {
      prob_measure(last.measure, path + ".measure", base_dir);
    } else {
      triplet(last.measure, path + ".triplet");
    }
    if (!names.insert(c.scenarios.back().name).second) invalid(path + ".name", "duplicate scenario name");
  }
  return c;
}

Config load_config(const std::string& source) {
  if (source == "builtin") return parse_config(builtin_config_json());
  if (source.rfind("builtin:", 0) == 0) {
    const std::string name = source.substr(8);
    Json all = builtin_config_json();
    Json picked = Json::array();
    for (const auto& s : all["scenarios"]) {
      if (s["name"] == name) picked.push_back(s);
    }
    if (picked.empty()) invalid("config", "no built-in scenario named '" + name + "'");
    all["scenarios"] = picked;
    return parse_config(all);
  }
  const std::filesystem::path p(source);
  Json j;
  try {
    j = Json::parse(io::read_file(p));
  } catch (const Json::parse_error& e) {
    invalid("config", std::string("parse error: ") + e.what());
  } catch (const Error& e) {
    invalid("config", e.what());
  }
  return parse_config(j, p.parent_path());
}

Json to_json(const Scenario& s) {
  Json j;
  j["name"] = s.name;
  j["description"] = s.description;
  j["type"] = s.type == ScenarioType::Clt ? "clt" : "levy";
  j[s.type == ScenarioType::Clt ? "measure" : "triplet"] = s.measure;
  j["limit_point"] = std::string(to_string(s.limit));
  j["target_B"] = s.target_b ? io::matrix_json(*s.target_b) : Json(nullptr);
  j["radii"] = {{"lo", s.radii.lo}, {"hi", s.radii.hi}, {"per_decade", s.radii.per_decade}};
  j["abscissae"] = s.abscissae;
  j["simulate"] = s.simulate;
  j["replicates"] = s.replicates;
  j["gof"] = {{"alpha", s.gof.alpha},
              {"tol_cov", s.gof.tol_cov},
              {"tol_kernel_rel", s.gof.tol_kernel_rel},
              {"tol_mean_rel", s.gof.tol_mean_rel},
              {"rank_tol", s.gof.rank_tol},
              {"permutations", s.gof.permutations},
              {"energy_max_points", s.gof.energy_max_points}};
  j["sim"] = {{"jump_cutoff", s.sim.jump_cutoff ? Json(*s.sim.jump_cutoff) : Json(nullptr)},
              {"gate", s.sim.gate},
              {"jump_budget", s.sim.jump_budget},
              {"max_expected_jumps", s.sim.max_expected_jumps},
              {"small_jump_mode", s.sim.small_jump_mode == SmallJumpMode::GaussianSubstitute ? "gaussian_substitute"
                                                                                          : "discard"}};
  Json decay = Json::array();
  for (const auto& [eta, r] : s.decay) decay.push_back({{"eta", eta}, {"s", r}});
  j["decay"] = decay;
  j["centering_check"] = s.centering_check;
  j["centering_at"] = s.centering_at ? Json(*s.centering_at) : Json(nullptr);
  j["seed"] = s.seed ? Json(*s.seed) : Json(nullptr);
  Json e = Json::object();
  if (s.expect.is_mrv0) e["is_mrv0"] = *s.expect.is_mrv0;
  if (s.expect.scaling_skipped) e["scaling_skipped"] = *s.expect.scaling_skipped;
  if (s.expect.gof_improving) e["gof_improving"] = *s.expect.gof_improving;
  if (s.expect.trace_index) e["trace_index"] = {s.expect.trace_index->first, s.expect.trace_index->second};
  if (s.expect.b_hat_distance_max) e["b_hat_distance_max"] = *s.expect.b_hat_distance_max;
  if (s.expect.rank) e["rank"] = *s.expect.rank;
  if (s.expect.centering_max) e["centering_max"] = *s.expect.centering_max;
  if (!s.expect.gof.empty()) {
    Json g = Json::array();
    for (const auto& ge : s.expect.gof) {
      Json x{{"at", ge.at}};
      if (ge.pass) x["pass"] = *ge.pass;
      if (ge.cov_rel_max) x["cov_rel_max"] = *ge.cov_rel_max;
      if (ge.kernel_leak_max) x["kernel_leak_max"] = *ge.kernel_leak_max;
      if (ge.pvalue_min) x["pvalue_min"] = *ge.pvalue_min;
      if (ge.variance_ratio_tol) x["variance_ratio_tol"] = *ge.variance_ratio_tol;
      g.push_back(x);
    }
    e["gof"] = g;
  }
  j["expect"] = e;
  return j;
}

Json to_json(const Config& c) {
  Json j{{"format", "gausslim-config/1"}, {"seed", c.seed}};
  Json sc = Json::array();
  for (const auto& s : c.scenarios) sc.push_back(to_json(s));
  j["scenarios"] = sc;
  return j;
}

Json builtin_config_json() {
  const Json uniform_2d_half = Json::array({Json::array({0.5, 0.0}), Json::array({0.0, 0.5})});
  const Json inverse_fourth = {{"type", "radial"},
                               {"dim", 2},
                               {"density", "lebesgue"},
                               {"shape", {{"kind", "power_law"}, {"coef", 0.3183098861837907}, {"exponent", 4.0}, {"r_min", 1.0}}}};
  Json shifted = inverse_fourth;
  shifted["center"] = {1.0, 0.0};
  const double r = 0.7071067811865476;

  Json sc = Json::array();
  sc.push_back({{"name", "finite-variance-box"},
                {"description", "uniform law on [-1,1]^2; finite variance, B = I/2, a_n = sqrt(3/2)/sqrt(n)"},
                {"type", "clt"},
                {"limit_point", "infinity"},
                {"measure", {{"type", "uniform_box"}, {"lo", {-1.0, -1.0}}, {"hi", {1.0, 1.0}}}},
                {"target_B", uniform_2d_half},
                {"radii", {{"lo", 1.5}, {"hi", 1e6}, {"per_decade", 16}}},
                {"abscissae", {256, 1024, 4096}},
                {"simulate", {4096}},
                {"replicates", 20000},
                {"expect",
                 {{"is_mrv0", true},
                  {"b_hat_distance_max", 1e-9},
                  {"rank", 2},
                  {"gof", {{{"at", 4096}, {"pass", true}, {"cov_rel_max", 0.05}, {"pvalue_min", 0.01}}}}}}});
  sc.push_back({{"name", "inverse-fourth-2d"},
                {"description", "density |x|^-4 / pi on |x| >= 1 in R^2; infinite variance, trace 2 log t"},
                {"type", "clt"},
                {"limit_point", "infinity"},
                {"measure", inverse_fourth},
                {"target_B", uniform_2d_half},
                {"radii", {{"lo", 1.0}, {"hi", 1e10}, {"per_decade", 16}}},
                {"abscissae", {1000, 10000, 100000}},
                {"simulate", {1000, 10000, 100000}},
                {"replicates", 10000},
                {"expect",
                 {{"is_mrv0", true},
                  {"b_hat_distance_max", 0.02},
                  {"rank", 2},
                  {"gof_improving", true},
                  {"gof", {{{"at", 100000}, {"cov_rel_max", 0.15}}}}}}});
  sc.push_back({{"name", "degenerate-diagonal"},
                {"description", "(Z, Z)/sqrt 2 with Z uniform on [-1,1]; rank-one limit"},
                {"type", "clt"},
                {"limit_point", "infinity"},
                {"measure",
                 {{"type", "linear_image"},
                  {"map", {{r}, {r}}},
                  {"base", {{"type", "uniform_box"}, {"lo", {-1.0}}, {"hi", {1.0}}}}}},
                {"target_B", {{0.5, 0.5}, {0.5, 0.5}}},
                {"radii", {{"lo", 1.5}, {"hi", 1e6}, {"per_decade", 16}}},
                {"abscissae", {10000}},
                {"simulate", {10000}},
                {"replicates", 10000},
                {"expect",
                 {{"is_mrv0", true},
                  {"b_hat_distance_max", 1e-9},
                  {"rank", 1},
                  {"gof", {{{"at", 10000}, {"kernel_leak_max", 0.01}}}}}}});
  sc.push_back({{"name", "stable-tails-negative"},
                {"description", "radial tails with index 1.5 in R^2; outside the Gaussian domain"},
                {"type", "clt"},
                {"limit_point", "infinity"},
                {"measure",
                 {{"type", "radial"},
                  {"dim", 2},
                  {"density", "lebesgue"},
                  {"shape", {{"kind", "power_law"}, {"coef", "auto"}, {"exponent", 3.5}, {"r_min", 1.0}}}}},
                {"radii", {{"lo", 1.0}, {"hi", 1e8}, {"per_decade", 16}}},
                {"abscissae", {1000}},
                {"expect", {{"is_mrv0", false}, {"trace_index", {0.4, 0.6}}, {"scaling_skipped", true}}}});
  sc.push_back({{"name", "shifted-inverse-fourth"},
                {"description", "inverse-fourth density shifted by (1, 0); centered and uncentered ratios"},
                {"type", "clt"},
                {"limit_point", "infinity"},
                {"measure", shifted},
                {"target_B", uniform_2d_half},
                {"radii", {{"lo", 1.0}, {"hi", 1e10}, {"per_decade", 16}}},
                {"abscissae", {1000}},
                {"centering_check", true},
                {"centering_at", 1e6},
                {"expect", {{"is_mrv0", true}, {"centering_max", 0.02}}}});
  sc.push_back({{"name", "levy-large-time"},
                {"description", "symmetric Levy density |x|^-3 on |x| > 1 in R; Gaussian as t -> infinity"},
                {"type", "levy"},
                {"limit_point", "infinity"},
                {"triplet",
                 {{"measure",
                   {{"type", "radial"},
                    {"dim", 1},
                    {"density", "lebesgue"},
                    {"shape", {{"kind", "power_law"}, {"coef", 1.0}, {"exponent", 3.0}, {"r_min", 1.0}}}}},
                  {"drift", {0.0}}}},
                {"target_B", {{1.0}}},
                {"radii", {{"lo", 1.0}, {"hi", 1e120}, {"per_decade", 4}}},
                {"abscissae", {100, 1000, 10000}},
                {"simulate", {100, 1000, 10000}},
                {"replicates", 10000},
                {"decay",
                 {{{"eta", 0.0}, {"s", 0.5}},
                  {{"eta", 0.0}, {"s", 1.0}},
                  {{"eta", 0.0}, {"s", 2.0}},
                  {{"eta", 1.0}, {"s", 0.5}},
                  {{"eta", 1.0}, {"s", 1.0}},
                  {{"eta", 1.0}, {"s", 2.0}}}},
                {"expect",
                 {{"is_mrv0", true}, {"gof_improving", true}, {"gof", {{{"at", 10000}, {"variance_ratio_tol", 0.10}}}}}}});
  sc.push_back({{"name", "levy-small-time"},
                {"description", "symmetric Levy density |x|^-3 log(1/|x|)^-2 on 0 < |x| < e^-2; Gaussian as t -> 0"},
                {"type", "levy"},
                {"limit_point", "zero"},
                {"triplet",
                 {{"measure",
                   {{"type", "radial"},
                    {"dim", 1},
                    {"density", "lebesgue"},
                    {"shape",
                     {{"kind", "log_corrected"},
                      {"coef", 1.0},
                      {"exponent", 3.0},
                      {"log_power", 2.0},
                      {"r_max", 0.1353352832366127}}}}},
                  {"drift", {0.0}}}},
                {"target_B", {{1.0}}},
                {"radii", {{"lo", 1e-12}, {"hi", 0.13}, {"per_decade", 16}}},
                {"abscissae", {0.01, 0.001, 0.0001}},
                {"simulate", {0.01, 0.001, 0.0001}},
                {"replicates", 10000},
                {"expect", {{"is_mrv0", true}, {"gof", {{{"at", 0.0001}, {"variance_ratio_tol", 0.15}}}}}}});
  return {{"format", "gausslim-config/1"}, {"seed", 20240601}, {"scenarios", sc}};
}

std::vector<std::pair<std::string, std::string>> builtin_catalogue() {
  std::vector<std::pair<std::string, std::string>> out;
  const Json all = builtin_config_json();
  for (const auto& s : all["scenarios"]) {
    out.emplace_back(s["name"].get<std::string>(), s["description"].get<std::string>());
  }
  return out;
}

std::optional<Scenario> find_builtin(const std::string& name) {
  const Json all = builtin_config_json();
  for (const auto& s : all["scenarios"]) {
    if (s["name"] == name) return parse_scenario(s);
  }
  return std::nullopt;
}

}  // namespace gausslim
