#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "gausslim/runner.hpp"

using namespace gausslim;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / ("gausslim-test-" + tag)) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), root).string()] = ss.str();
  }
  return out;
}

// Two cheap scenarios: a trimmed box run and the curve-only stable case.
Config cheap_config() {
  nlohmann::json j = builtin_config_json();
  nlohmann::json keep = nlohmann::json::array();
  for (auto s : j["scenarios"]) {
    if (s["name"] == "finite-variance-box") {
      s["abscissae"] = {256};
      s["simulate"] = {256};
      s["replicates"] = 2000;
      s["expect"]["gof"][0]["at"] = 256;
      keep.push_back(s);
    } else if (s["name"] == "stable-tails-negative") {
      keep.push_back(s);
    }
  }
  j["scenarios"] = keep;
  return parse_config(j);
}

}  // namespace

TEST_SUITE("runner") {
  TEST_CASE("same config and seed give byte-identical artifacts") {
    const Config c = cheap_config();
    TempDir a("det-a"), b("det-b");
    RunOptions oa, ob;
    oa.out = a.path;
    ob.out = b.path;
    ob.jobs = 2;
    const auto ra = run(c, oa);
    const auto rb = run(c, ob);
    CHECK(ra.all_pass());
    REQUIRE(ra.scenarios.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) CHECK(ra.scenarios[i].manifest_sha256 == rb.scenarios[i].manifest_sha256);
    const auto ta = tree(a.path), tb = tree(b.path);
    CHECK(ta.size() == tb.size());
    CHECK(ta == tb);
    CHECK(ta.count("manifest.json") == 1);
    CHECK(ta.count("finite-variance-box/curve.csv") == 1);
    CHECK(ta.count("stable-tails-negative/mrv.json") == 1);
  }

  TEST_CASE("a scenario's artifacts do not depend on its neighbours") {
    const Config both = cheap_config();
    Config alone = both;
    alone.scenarios.erase(alone.scenarios.begin() + 1);
    TempDir a("iso-a"), b("iso-b");
    RunOptions oa, ob;
    oa.out = a.path;
    ob.out = b.path;
    const auto ra = run(alone, oa);
    const auto rb = run(both, ob);
    CHECK(ra.scenarios[0].manifest_sha256 == rb.scenarios[0].manifest_sha256);
  }

  TEST_CASE("seed override changes the sample artifacts") {
    const Config c = cheap_config();
    TempDir a("seed-a"), b("seed-b");
    RunOptions oa, ob;
    oa.out = a.path;
    ob.out = b.path;
    ob.seed_override = 99;
    run(c, oa);
    const auto rb = run(c, ob);
    CHECK(rb.scenarios[0].seed == 99);
    CHECK(tree(a.path)["finite-variance-box/gof_summary.csv"] != tree(b.path)["finite-variance-box/gof_summary.csv"]);
    CHECK(tree(a.path)["stable-tails-negative/curve.csv"] == tree(b.path)["stable-tails-negative/curve.csv"]);
  }

  TEST_CASE("skipped scaling is reported") {
    const auto s = find_builtin("stable-tails-negative");
    REQUIRE(s);
    TempDir d("skip");
    const auto r = run_scenario(*s, 1, {}, d.path);
    CHECK(r.pass);
    CHECK(r.scaling_skipped.has_value());
    CHECK_FALSE(r.error.has_value());
  }

  TEST_CASE("describe mentions the measure and the plan") {
    const auto s = find_builtin("levy-large-time");
    REQUIRE(s);
    const std::string d = describe(*s);
    CHECK(d.find("levy-large-time") != std::string::npos);
    CHECK(d.find("Levy") != std::string::npos);
  }
}
