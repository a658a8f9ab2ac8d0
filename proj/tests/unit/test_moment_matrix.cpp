#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gausslim/errors.hpp"
#include "gausslim/moment_matrix.hpp"

using namespace gausslim;

namespace {

ProbMeasure box() { return ProbMeasure::uniform_box(Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1)); }

ProbMeasure diagonal() {
  Eigen::MatrixXd map(2, 1);
  map << std::sqrt(0.5), std::sqrt(0.5);
  return ProbMeasure::linear_image(
      map, ProbMeasure::uniform_box(Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 1.0)));
}

ProbMeasure radial_2d(double exponent, Eigen::VectorXd center = {}) {
  PowerLawShape rho;
  rho.exponent = exponent;
  rho.r_min = 1.0;
  // normalize: int_1^inf c r^-e 2 pi r dr = 2 pi c / (e - 2)
  rho.coef = (exponent - 2.0) / (2.0 * std::numbers::pi);
  return ProbMeasure::radial_from_lebesgue(rho, 2, std::move(center));
}

LevyMeasure inverse_cube_1d() {
  PowerLawShape rho;
  rho.exponent = 3.0;
  rho.r_min = 1.0;
  return LevyMeasure::radial_from_lebesgue(rho, 1);
}

}  // namespace

TEST_SUITE("moment_matrix") {
  TEST_CASE("box curve is constant past the corner") {
    const auto c = build_curve(box(), log_grid(0.1, 10.0, 16));
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c.radii[i] < std::sqrt(2.0)) continue;
      CHECK((c.matrices[i] - Eigen::Matrix2d::Identity() / 3.0).norm() < 1e-12);
    }
  }

  TEST_CASE("box curve is matrix slowly varying with B = I/2") {
    const auto c = build_curve(box(), log_grid(1.5, 1e6, 16));
    const auto r = mrv_diagnose(c, LimitPoint::Infinity, Eigen::MatrixXd(Eigen::Matrix2d::Identity() / 2.0));
    CHECK(r.is_mrv0);
    CHECK(r.rank == 2);
    CHECK((r.b_hat - Eigen::Matrix2d::Identity() / 2.0).norm() < 1e-12);
    CHECK(r.b_hat.trace() == doctest::Approx(1.0).epsilon(1e-9));
    REQUIRE(r.k_convention);
    CHECK(*r.k_convention == doctest::Approx(1.0));
  }

  TEST_CASE("degenerate construction has rank one at every radius") {
    const auto c = build_curve(diagonal(), log_grid(0.01, 1e6, 16));
    Eigen::Matrix2d ones;
    ones << 0.5, 0.5, 0.5, 0.5;
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK((c.matrices[i] / c.trace[i] - ones).norm() < 1e-12);
    }
    const auto r = mrv_diagnose(c, LimitPoint::Infinity);
    CHECK(r.is_mrv0);
    CHECK(r.rank == 1);
    CHECK((r.b_hat - ones).norm() < 1e-12);
  }

  TEST_CASE("inverse-fourth curve is (log t) I") {
    const auto c = build_curve(radial_2d(4.0), log_grid(10.0, 1e10, 8));
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double l = std::log(c.radii[i]);
      CHECK((c.matrices[i] - l * Eigen::Matrix2d::Identity()).norm() < 1e-4 * l);
    }
    const auto r = mrv_diagnose(c, LimitPoint::Infinity, Eigen::MatrixXd(Eigen::Matrix2d::Identity() / 2.0));
    CHECK(r.is_mrv0);
    CHECK(*r.target_distance < 0.02);
  }

  TEST_CASE("stable-domain tails are not slowly varying") {
    const auto c = build_curve(radial_2d(3.5), log_grid(1.0, 1e8, 16));
    const auto r = mrv_diagnose(c, LimitPoint::Infinity);
    CHECK(r.trace_diagnosis.index_estimate == doctest::Approx(0.5).epsilon(0.2));
    CHECK(std::abs(r.trace_diagnosis.index_estimate - 0.5) < 0.1);
    CHECK_FALSE(r.is_mrv0);
  }

  TEST_CASE("curve invariants") {
    const auto c = build_curve(radial_2d(4.0, Eigen::Vector2d(1.0, 0.5)), log_grid(0.5, 1e6, 8));
    for (std::size_t i = 0; i < c.size(); ++i) {
      const Eigen::Matrix2d a = c.matrices[i];
      CHECK((a - a.transpose()).norm() == 0.0);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(a);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10 * c.trace[i]);
      CHECK(c.trace[i] >= 0.0);
    }
    const auto l = build_curve(inverse_cube_1d(), log_grid(0.5, 1e6, 8));
    for (std::size_t i = 1; i < l.size(); ++i) CHECK(l.trace[i] >= l.trace[i - 1]);
  }

  TEST_CASE("radius stability: equal radii give zero") {
    std::vector<LevyMeasure> fam;
    for (int i = 0; i < 10; ++i) fam.push_back(inverse_cube_1d().rescaled(std::pow(10.0, i), std::pow(10.0, -i)));
    const auto s = radius_stability_check(fam, 1.0, 1.0);
    for (double d : s.discrepancy) CHECK(d == 0.0);
  }

  TEST_CASE("radius stability: no mass between the radii") {
    Eigen::MatrixXd pts(2, 2);
    pts << 0.1, 0.0, 0.0, -0.2;
    std::vector<LevyMeasure> fam;
    for (int i = 1; i <= 10; ++i) fam.push_back(LevyMeasure::atoms(pts, {1.0 * i, 2.0 * i}));
    const auto s = radius_stability_check(fam, 0.5, 2.0);
    CHECK(s.trailing_sup == 0.0);
    CHECK(s.final_value == 0.0);
  }

  TEST_CASE("radius stability needs a long enough family") {
    std::vector<LevyMeasure> fam{inverse_cube_1d()};
    try {
      radius_stability_check(fam, 0.5, 2.0);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::FamilyTooShort);
    }
  }

  TEST_CASE("centering comparison is exact for symmetric laws") {
    const auto cc = centered_uncentered_compare(radial_2d(4.0), log_grid(1.0, 1e6, 8));
    for (double d : cc.discrepancy) CHECK(d < 1e-14);
  }

  TEST_CASE("centering comparison for the shifted law") {
    const auto cc = centered_uncentered_compare(radial_2d(4.0, Eigen::Vector2d(1.0, 0.0)), log_grid(1.0, 1e6, 8));
    // S_t = (log t) I + m m^T + o(1): the uncentered ratios differ by |m m^T| / tr S_t
    const double expected = 1.0 / (2.0 * std::log(1e6) + 1.0);
    CHECK(cc.final_value == doctest::Approx(expected).epsilon(0.01));
    for (std::size_t i = 1; i < cc.discrepancy.size(); ++i) {
      if (cc.radii[i] > 10.0) CHECK(cc.discrepancy[i] < cc.discrepancy[i - 1]);
    }
  }

  TEST_CASE("centering comparison preconditions") {
    try {
      centered_uncentered_compare(box(), log_grid(1.0, 1e6, 8));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::FiniteSecondMoment);
    }
  }
}
