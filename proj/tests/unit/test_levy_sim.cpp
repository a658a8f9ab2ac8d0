#include <doctest.h>

#include <cmath>

#include "gausslim/errors.hpp"
#include "gausslim/kernels.hpp"
#include "gausslim/levy_sim.hpp"

using namespace gausslim;

namespace {

LevyMeasure inverse_cube_1d() {
  PowerLawShape rho;
  rho.exponent = 3.0;
  rho.r_min = 1.0;
  return LevyMeasure::radial_from_lebesgue(rho, 1);
}

LevyTriplet small_time() {
  LogCorrectedShape rho;
  rho.exponent = 3.0;
  rho.log_power = 2.0;
  rho.r_max = std::exp(-2.0);
  return LevyTriplet(LevyMeasure::radial_from_lebesgue(rho, 1), Eigen::VectorXd::Zero(1));
}

ScalingPlan plan_for(const LevyTriplet& tr, double lo, double hi, LimitPoint c, std::vector<double> ts) {
  const auto curve = build_curve(tr.measure, log_grid(lo, hi, 8));
  const auto mrv = mrv_diagnose(curve, c);
  return levy_scaling(tr, curve, mrv, 1.0, ts);
}

}  // namespace

TEST_SUITE("levy_sim") {
  TEST_CASE("single atom gives a scaled Poisson count") {
    Eigen::MatrixXd u(1, 2);
    u << 0.6, -0.8;
    const double lambda = 3.0;
    const LevyTriplet tr(LevyMeasure::atoms(u, {lambda}), Eigen::VectorXd::Zero(2));
    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.seed = Seed{17};
    ResolvedCutoff rc;
    const Eigen::MatrixXd x = simulate_marginal(tr, 1.0, cfg, &rc);
    // the drift compensates the 1/(1+|x|^2) convention: t (b - lambda u / 2 + lambda u)
    const Eigen::RowVectorXd shifted_mean = x.colwise().mean() - rc.drift.transpose();
    const double se = std::sqrt(lambda / cfg.n_paths);
    CHECK(std::abs(shifted_mean(0) - lambda * 0.6) < 3.0 * se * 0.6);
    CHECK(std::abs(shifted_mean(1) + lambda * 0.8) < 3.0 * se * 0.8);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double k = (x(i, 0) - rc.drift(0)) / 0.6;
      CHECK(std::abs(k - std::round(k)) < 1e-9);
    }
  }

  TEST_CASE("discarding every jump leaves the drift") {
    const LevyTriplet tr(inverse_cube_1d(), Eigen::VectorXd::Constant(1, 0.25));
    SimConfig cfg;
    cfg.n_paths = 100;
    cfg.small_jump_mode = SmallJumpMode::Discard;
    cfg.jump_cutoff = 1e300;
    ResolvedCutoff rc;
    const Eigen::MatrixXd x = simulate_marginal(tr, 2.0, cfg, &rc);
    for (Eigen::Index i = 0; i < x.rows(); ++i) CHECK(x(i, 0) == rc.drift(0));
    CHECK(rc.drift(0) == doctest::Approx(0.5));
  }

  TEST_CASE("truncated second moment of X_t tracks 2 t log R") {
    const LevyTriplet tr(inverse_cube_1d(), Eigen::VectorXd::Zero(1));
    SimConfig cfg;
    cfg.n_paths = 1000000;
    cfg.seed = Seed{23};
    const double t = 0.1, r = 20.0;
    const Eigen::MatrixXd x = simulate_marginal(tr, t, cfg);
    double s = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) s += std::abs(x(i, 0)) <= r ? x(i, 0) * x(i, 0) : 0.0;
    CHECK(s / cfg.n_paths == doctest::Approx(2.0 * t * std::log(r)).epsilon(0.05));
  }

  TEST_CASE("jumps along one direction stay on its line") {
    Eigen::MatrixXd map(2, 1);
    map << std::sqrt(0.5), std::sqrt(0.5);
    const LevyTriplet tr(LevyMeasure::linear_image(map, inverse_cube_1d()), Eigen::VectorXd::Zero(2));
    const auto plan = plan_for(tr, 1.0, 1e40, LimitPoint::Infinity, {10.0});
    SimConfig cfg;
    cfg.n_paths = 5000;
    const Eigen::MatrixXd x = scaled_marginal(tr, plan, 10.0, cfg);
    for (Eigen::Index i = 0; i < x.rows(); ++i) CHECK(x(i, 0) == x(i, 1));
  }

  TEST_CASE("rescaled measure") {
    const auto m = inverse_cube_1d();
    const auto same = rescaled_measure(m, 1.0, 1.0);
    for (double r : {0.5, 2.0, 30.0}) {
      CHECK(same.tail_mass(r) == doctest::Approx(m.tail_mass(r)).epsilon(1e-12));
      CHECK(same.truncated(r).second(0, 0) == doctest::Approx(m.truncated(r).second(0, 0)).epsilon(1e-12));
    }
    // t M(. / a) has tail t M(|x| > s / a)
    const auto r = rescaled_measure(m, 5.0, 0.1);
    CHECK(r.tail_mass(0.3) == doctest::Approx(5.0 * m.tail_mass(3.0)).epsilon(1e-10));
    Eigen::MatrixXd u(1, 1);
    u << 2.0;
    const auto at = rescaled_measure(LevyMeasure::atoms(u, {1.5}), 4.0, 0.25);
    CHECK(std::get<LevyMeasure::Atoms>(at.repr()).points(0, 0) == doctest::Approx(0.5));
    CHECK(std::get<LevyMeasure::Atoms>(at.repr()).masses[0] == doctest::Approx(6.0));
  }

  TEST_CASE("eta decay: eta = 0 is the tail mass of the rescaled measure") {
    const LevyTriplet tr(inverse_cube_1d(), Eigen::VectorXd::Zero(1));
    const auto plan = plan_for(tr, 1.0, 1e40, LimitPoint::Infinity, {1e2, 1e4, 1e8});
    const auto d = eta_moment_decay(tr.measure, plan, 0.0, 1.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(d[i].value == doctest::Approx(rescaled_measure(tr.measure, plan.abscissae[i], plan.a[i]).tail_mass(1.0)));
    }
  }

  TEST_CASE("eta decay against the closed form 2 t a^2 / s") {
    const LevyTriplet tr(inverse_cube_1d(), Eigen::VectorXd::Zero(1));
    std::vector<double> ts;
    for (int e = 2; e <= 80; e += 6) ts.push_back(std::pow(10.0, e));
    const auto plan = plan_for(tr, 1.0, 1e120, LimitPoint::Infinity, ts);
    const auto d = eta_moment_decay(tr.measure, plan, 1.0, 1.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double a = plan.a[i];
      CHECK(d[i].value == doctest::Approx(2.0 * ts[i] * a * a).epsilon(1e-6));
      if (i > 0) CHECK(d[i].value < d[i - 1].value);
    }
  }

  TEST_CASE("eta decay vanishes beyond the support") {
    Eigen::MatrixXd u(1, 1);
    u << 2.0;
    const LevyTriplet tr(LevyMeasure::atoms(u, {1.0}), Eigen::VectorXd::Zero(1));
    ScalingPlan plan;
    plan.abscissae = {1.0, 10.0};
    plan.a = {1.0, 0.5};
    plan.xi = {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)};
    for (const auto& p : eta_moment_decay(tr.measure, plan, 0.0, 5.0)) CHECK(p.value == 0.0);
    CHECK_THROWS_AS(eta_moment_decay(tr.measure, plan, 2.0, 1.0), Error);
  }

  TEST_CASE("substitution gate holds on resolution") {
    const auto tr = small_time();
    SimConfig cfg;
    for (double t : {1e-2, 1e-4}) {
      const auto rc = resolve_cutoff(tr, t, cfg);
      CHECK((rc.gate_value >= cfg.gate || !rc.warnings.empty()));
      if (rc.halvings == 0) CHECK(rc.rate == doctest::Approx(cfg.jump_budget).epsilon(1e-6));
      CHECK(rc.small_cov(0, 0) == doctest::Approx(t * 2.0 / std::log(1.0 / rc.epsilon)).epsilon(1e-6));
    }
    // a tiny budget forces halvings
    SimConfig tight = cfg;
    tight.jump_budget = 1e-3;
    tight.gate = 1e3;
    tight.max_expected_jumps = 1e4;
    const auto rc = resolve_cutoff(tr, 1e-2, tight);
    CHECK(rc.halvings > 0);
    CHECK_FALSE(rc.warnings.empty());
  }

  TEST_CASE("tail, drift and truncation criteria along the large-time family") {
    const LevyTriplet tr(inverse_cube_1d(), Eigen::VectorXd::Zero(1));
    std::vector<double> ts;
    for (int e = 4; e <= 100; e += 16) ts.push_back(std::pow(10.0, e));
    const auto plan = plan_for(tr, 1.0, 1e120, LimitPoint::Infinity, ts);
    const auto fam = rescaled_family(tr.measure, plan);
    for (double s : {0.5, 1.0, 2.0}) {
      for (std::size_t i = 1; i < fam.size(); ++i) CHECK(fam[i].tail_mass(s) < fam[i - 1].tail_mass(s));
      // t a^2 / s^2 with t a^2 = 1 / (2 log(1/a)): decays only logarithmically
      const double a = plan.a.back();
      CHECK(fam.back().tail_mass(s) == doctest::Approx(1.0 / (2.0 * std::log(1.0 / a) * s * s)).epsilon(1e-3));
    }
    for (std::size_t i = 0; i < fam.size(); ++i) CHECK(accompanying_drift(tr, plan, i).norm() < 1e-12);
    CHECK(std::abs(fam.back().truncated(1.0).second(0, 0) - 1.0) < 0.05);
  }

  TEST_CASE("accompanying drift vanishes for an asymmetric measure") {
    Eigen::MatrixXd u(2, 1);
    u << 1.0, -2.0;
    const LevyTriplet tr(LevyMeasure::atoms(u, {1.0, 0.3}), Eigen::VectorXd::Constant(1, 0.7));
    const auto curve = build_curve(tr.measure, log_grid(2.5, 1e5, 8));
    const auto mrv = mrv_diagnose(curve, LimitPoint::Infinity);
    REQUIRE(mrv.is_mrv0);
    const auto plan = levy_scaling(tr, curve, mrv, 1.0, std::vector<double>{1e2, 1e4, 1e6});
    double prev = 1e300;
    for (std::size_t i = 0; i < 3; ++i) {
      const double d = accompanying_drift(tr, plan, i).norm();
      CHECK(d < prev);
      prev = d;
    }
    CHECK(prev < 1e-2);
  }

  TEST_CASE("convolution semigroup: X_{s+t} matches X_s + X_t") {
    const LevyTriplet tr(inverse_cube_1d(), Eigen::VectorXd::Constant(1, 0.1));
    SimConfig cfg;
    cfg.n_paths = 2000;
    cfg.seed = Seed{101};
    cfg.label = "a";
    const Eigen::MatrixXd a = simulate_marginal(tr, 0.7, cfg);
    cfg.label = "b";
    const Eigen::MatrixXd b = simulate_marginal(tr, 1.3, cfg);
    cfg.label = "c";
    const Eigen::MatrixXd c = simulate_marginal(tr, 2.0, cfg);
    const auto e = kernels::energy_data(a + b, c);
    std::vector<float> group(e.n1 + e.n2, 0.0f);
    std::fill(group.begin(), group.begin() + static_cast<std::ptrdiff_t>(e.n1), 1.0f);
    const double stat = kernels::energy_statistic(e, group);
    const std::size_t perms = 200;
    const std::size_t exceed = kernels::energy_exceedances_omp(e, stat, perms, Seed{9});
    CHECK(static_cast<double>(1 + exceed) / (perms + 1) > 0.01);
  }
}
