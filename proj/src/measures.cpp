#include "gausslim/measures.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "gausslim/errors.hpp"
#include "gausslim/quadrature.hpp"

namespace gausslim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassTol = 1e-9;
constexpr std::size_t kSampleBlock = 4096;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// c > 0 when map^T map = c^2 I, else 0
double conformal_scale(const Eigen::MatrixXd& map) {
  if (map.cols() == 0 || map.rows() < map.cols()) return 0.0;
  const Eigen::MatrixXd g = map.transpose() * map;
  const double c2 = g.trace() / static_cast<double>(map.cols());
  if (!(c2 > 0)) return 0.0;
  const Eigen::MatrixXd dev = g - c2 * Eigen::MatrixXd::Identity(map.cols(), map.cols());
  return dev.norm() <= 1e-12 * c2 * static_cast<double>(map.cols()) ? std::sqrt(c2) : 0.0;
}

TruncatedMoments zero_moments(int d) {
  return {Eigen::MatrixXd::Zero(d, d), Eigen::VectorXd::Zero(d), 0.0, true, true};
}

TruncatedMoments map_moments(const Eigen::MatrixXd& L, const TruncatedMoments& b) {
  TruncatedMoments m;
  m.second = L * b.second * L.transpose();
  m.second = 0.5 * (m.second + m.second.transpose());
  m.first = L * b.first;
  m.tail_mass = b.tail_mass;
  m.first_finite = b.first_finite;
  m.tail_finite = b.tail_finite;
  return m;
}

// int_{lo}^{hi} g(r) w(r) dr for a signed weight, integrated in u = log r
// Radial law centered at m with uniform direction in R^2, over |x| <= t.
// Direction u = (cos th, sin th) in the frame e1 = m / |m|; along u the ball is
// the radius interval [r_lo(th), r_hi(th)] and the radial integrals are closed form.
TruncatedMoments shifted_disk(const RadialProfile& p, const Eigen::VectorXd& m, double t) {
  const double mu = m.norm();
  TruncatedMoments out = zero_moments(2);
  struct Band {
    double c, s, lo, hi, jac;
  };
  std::function<Band(double)> band;
  double x0 = 0.0, x1 = std::numbers::pi;
  if (t >= mu) {
    band = [&](double th) {
      const double c = std::cos(th), s = std::sin(th);
      const double sq = std::sqrt(std::max(0.0, (t - mu * s) * (t + mu * s)));
      const double hi = c > 0 ? (t - mu) * (t + mu) / (mu * c + sq) : sq - mu * c;
      return Band{c, s, 0.0, hi, 1.0};
    };
  } else {
    // only th' = pi - th with sin th' <= t / mu meets the ball; sin th' = (t / mu) sin psi
    band = [&](double psi) {
      const double sp = t / mu * std::sin(psi);
      const double cp = std::sqrt(std::max(0.0, (1.0 - sp) * (1.0 + sp)));
      const double sq = t * std::cos(psi);
      const double hi = mu * cp + sq;
      const double lo = (mu - t) * (mu + t) / hi;
      return Band{-cp, sp, lo, hi, t / mu * std::cos(psi) / cp};
    };
    x1 = 0.5 * std::numbers::pi;
  }
  auto integrate = [&](auto&& g, const char* what) {
    auto f = [&](double x) {
      const Band b = band(x);
      return b.jac * g(b);
    };
    return quad::checked(f, x0, x1, quad::kDefaultRelTol, what) / std::numbers::pi;
  };
  auto ik = [&](double k, const Band& b) { return b.hi > b.lo ? p.power_integral(k, b.lo, b.hi) : 0.0; };
  const double sxx = integrate(
      [&](const Band& b) { return mu * mu * ik(0, b) + 2.0 * mu * b.c * ik(1, b) + b.c * b.c * ik(2, b); },
      "shifted second");
  const double syy = integrate([&](const Band& b) { return b.s * b.s * ik(2, b); }, "shifted second");
  const double fx = integrate([&](const Band& b) { return mu * ik(0, b) + b.c * ik(1, b); }, "shifted first");
  // directions that miss the ball contribute their full mass to the tail
  const double hit = integrate([&](const Band& b) {
    return p.power_integral(0.0, 0.0, b.lo) + p.power_integral(0.0, b.hi, kInf);
  }, "shifted tail");
  out.tail_mass = hit;
  if (t < mu) {
    // fraction of directions that meet the ball at all
    const double covered = std::asin(t / mu) / std::numbers::pi;
    out.tail_mass += p.power_integral(0.0, 0.0, kInf) * (1.0 - covered);
  }

  Eigen::Matrix2d R;
  R.col(0) = m / mu;
  R.col(1) << -R(1, 0), R(0, 0);
  Eigen::Matrix2d S;
  S << sxx, 0.0, 0.0, syy;
  out.second = R * S * R.transpose();
  out.first = R.col(0) * fx;
  return out;
}

// Radial law centered at m with atomic directions.
TruncatedMoments shifted_atoms(const RadialProfile& p, const DirectionLaw::Atoms& a,
                               const Eigen::VectorXd& m, double t) {
  const auto d = static_cast<int>(m.size());
  TruncatedMoments out = zero_moments(d);
  const double mu2 = m.squaredNorm();
  for (std::size_t k = 0; k < a.directions.size(); ++k) {
    const Eigen::VectorXd& u = a.directions[k];
    const double w = a.weights[k];
    if (w == 0.0) continue;
    // |m + r u|^2 <= t^2  <=>  r^2 + 2 r (u.m) + |m|^2 - t^2 <= 0
    const double b = u.dot(m);
    const double disc = b * b - mu2 + t * t;
    double lo = 0.0, hi = 0.0;
    if (disc >= 0) {
      const double sq = std::sqrt(disc);
      lo = std::max(0.0, -b - sq);
      hi = std::max(0.0, -b + sq);
    }
    double i0 = 0, i1 = 0, i2 = 0;
    if (hi > lo) {
      i0 = p.power_integral(0.0, lo, hi);
      i1 = p.power_integral(1.0, lo, hi);
      i2 = p.power_integral(2.0, lo, hi);
    }
    out.second += w * (i0 * m * m.transpose() + i1 * (m * u.transpose() + u * m.transpose()) +
                       i2 * u * u.transpose());
    out.first += w * (i0 * m + i1 * u);
    const double tail = hi > lo ? p.power_integral(0.0, 0.0, lo) + p.power_integral(0.0, hi, kInf)
                                : p.power_integral(0.0, 0.0, kInf);
    out.tail_mass += w * tail;
  }
  return out;
}

TruncatedMoments radial_centered(const RadialProfile& p, const DirectionLaw& dir, double t) {
  const int d = dir.dim();
  TruncatedMoments out = zero_moments(d);
  out.second = dir.second_moment() * p.power_integral(2.0, 0.0, t);
  const Eigen::VectorXd e = dir.mean();
  if (!e.isZero(0.0)) {
    const double i1 = p.power_integral_or_inf(1.0, 0.0, t);
    if (std::isfinite(i1)) {
      out.first = e * i1;
    } else {
      out.first_finite = false;
    }
  }
  if (t < p.r_max()) {
    const double tail = p.power_integral_or_inf(0.0, t, kInf);
    out.tail_mass = tail;
    out.tail_finite = std::isfinite(tail);
  }
  return out;
}

// x2-integrals of 1, x2, x2^2 over [l, h] intersected with [-s, s]
Eigen::Vector3d interval_moments(double l, double h, double s) {
  const double a = std::max(l, -s), b = std::min(h, s);
  if (!(b > a)) return Eigen::Vector3d::Zero();
  return {b - a, 0.5 * (b * b - a * a), (b * b * b - a * a * a) / 3.0};
}

TruncatedMoments box_moments(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, double t) {
  const auto d = static_cast<int>(lo.size());
  const double vol = (hi - lo).prod();
  Eigen::VectorXd far(d);
  for (int i = 0; i < d; ++i) far[i] = std::max(std::abs(lo[i]), std::abs(hi[i]));
  TruncatedMoments out = zero_moments(d);
  if (far.norm() <= t) {
    const Eigen::VectorXd c = 0.5 * (lo + hi);
    out.second = c * c.transpose();
    for (int i = 0; i < d; ++i) out.second(i, i) += (hi[i] - lo[i]) * (hi[i] - lo[i]) / 12.0;
    out.first = c;
    return out;
  }
  if (d == 1) {
    const auto m = interval_moments(lo[0], hi[0], t) / vol;
    out.second(0, 0) = m[2];
    out.first[0] = m[1];
    out.tail_mass = 1.0 - m[0];
    return out;
  }
  if (d != 2) {
    throw Error(Errc::UnsupportedKind,
                "box truncated at a radius cutting the box is supported only for d <= 2");
  }
  const double a = std::max(lo[0], -t), b = std::min(hi[0], t);
  if (!(b > a)) {
    out.tail_mass = 1.0;
    return out;
  }
  // kinks where the circle crosses the horizontal edges
  std::vector<double> cuts{a, b};
  for (double y : {lo[1], hi[1]}) {
    if (std::abs(y) < t) {
      const double x = std::sqrt(t * t - y * y);
      for (double c : {-x, x}) {
        if (c > a && c < b) cuts.push_back(c);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  auto inner = [&](double x) { return interval_moments(lo[1], hi[1], std::sqrt(std::max(0.0, t * t - x * x))); };
  double mass = 0, s11 = 0, s12 = 0, s22 = 0, f1 = 0, f2 = 0;
  for (std::size_t k = 1; k < cuts.size(); ++k) {
    const double x0 = cuts[k - 1], x1 = cuts[k];
    if (!(x1 > x0)) continue;
    mass += quad::checked([&](double x) { return inner(x)[0]; }, x0, x1, 1e-8, "box mass");
    s11 += quad::checked([&](double x) { return x * x * inner(x)[0]; }, x0, x1, 1e-8, "box moment");
    s12 += quad::checked([&](double x) { return x * inner(x)[1]; }, x0, x1, 1e-8, "box moment");
    s22 += quad::checked([&](double x) { return inner(x)[2]; }, x0, x1, 1e-8, "box moment");
    f1 += quad::checked([&](double x) { return x * inner(x)[0]; }, x0, x1, 1e-8, "box moment");
    f2 += quad::checked([&](double x) { return inner(x)[1]; }, x0, x1, 1e-8, "box moment");
  }
  out.second << s11, s12, s12, s22;
  out.second /= vol;
  out.first << f1 / vol, f2 / vol;
  out.tail_mass = std::max(0.0, 1.0 - mass / vol);
  return out;
}

}  // namespace

std::string_view to_string(MeasureKind k) noexcept {
  switch (k) {
    case MeasureKind::Empirical: return "empirical";
    case MeasureKind::RadialAnalytic: return "radial_analytic";
    case MeasureKind::FiniteVarianceAnalytic: return "finite_variance_analytic";
    case MeasureKind::LinearImage: return "linear_image";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// ProbMeasure

ProbMeasure ProbMeasure::empirical(Eigen::MatrixXd points, std::vector<double> weights) {
  const auto n = static_cast<std::size_t>(points.rows());
  const auto d = static_cast<int>(points.cols());
  if (n == 0 || d < 1) throw Error(Errc::InvalidArgument, "empirical measure needs at least one point");
  if (!points.allFinite()) throw Error(Errc::InvalidArgument, "empirical points must be finite");
  if (weights.empty()) {
    weights.assign(n, 1.0 / static_cast<double>(n));
  } else {
    if (weights.size() != n) throw Error(Errc::InvalidArgument, "weight count differs from point count");
    double total = 0;
    for (double w : weights) {
      if (!(w >= 0) || !std::isfinite(w)) throw Error(Errc::InvalidArgument, "weights must be nonnegative");
      total += w;
    }
    if (std::abs(total - 1.0) > kMassTol) {
      std::ostringstream os;
      os << "weights sum to " << total;
      throw Error(Errc::NotNormalized, os.str());
    }
  }
  ProbMeasure pm(d);
  Empirical e;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const Eigen::VectorXd norms = points.rowwise().norm();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return norms[i] < norms[j]; });
  const auto dd = static_cast<std::size_t>(d) * d;
  e.sorted_norms.resize(n);
  e.prefix_second.assign((n + 1) * dd, 0.0);
  e.prefix_first.assign((n + 1) * d, 0.0);
  e.prefix_mass.assign(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    const double w = weights[i];
    e.sorted_norms[k] = norms[i];
    const double* ps = &e.prefix_second[k * dd];
    double* qs = &e.prefix_second[(k + 1) * dd];
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) qs[a * d + b] = ps[a * d + b] + w * points(i, a) * points(i, b);
      e.prefix_first[(k + 1) * d + a] = e.prefix_first[k * d + a] + w * points(i, a);
    }
    e.prefix_mass[k + 1] = e.prefix_mass[k] + w;
  }
  e.cumulative_weight.resize(n);
  std::partial_sum(weights.begin(), weights.end(), e.cumulative_weight.begin());
  e.points = std::move(points);
  e.weights = std::move(weights);
  pm.repr_ = std::move(e);
  return pm;
}

ProbMeasure ProbMeasure::radial(RadialProfile profile, DirectionLaw direction, Eigen::VectorXd center) {
  const int d = direction.dim();
  if (center.size() == 0) center = Eigen::VectorXd::Zero(d);
  if (center.size() != d) throw Error(Errc::InvalidArgument, "center dimension differs from direction law");
  const double mass = profile.power_integral_or_inf(0.0, 0.0, kInf);
  if (!(std::abs(mass - 1.0) <= kMassTol)) {
    std::ostringstream os;
    os << "radial profile has total mass " << mass;
    throw Error(Errc::NotNormalized, os.str());
  }
  ProbMeasure pm(d);
  auto sampler = std::make_shared<const RadialSampler>(profile, 0.0);
  pm.repr_ = Radial{std::move(profile), std::move(direction), std::move(center), std::move(sampler)};
  return pm;
}

ProbMeasure ProbMeasure::radial_from_lebesgue(const PowerLawShape& rho, int dim, Eigen::VectorXd center) {
  if (dim < 1) throw Error(Errc::InvalidArgument, "dimension must be at least 1");
  PowerLawShape g = rho;
  g.coef *= sphere_area(dim);
  g.exponent -= dim - 1;
  return radial(RadialProfile(g), DirectionLaw::uniform(dim), std::move(center));
}

ProbMeasure ProbMeasure::uniform_box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  if (lo.size() < 1 || lo.size() != hi.size()) throw Error(Errc::InvalidArgument, "box corners differ in dimension");
  for (int i = 0; i < lo.size(); ++i) {
    if (!(hi[i] > lo[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i])) {
      throw Error(Errc::InvalidArgument, "box needs finite lo < hi in every coordinate");
    }
  }
  ProbMeasure pm(static_cast<int>(lo.size()));
  pm.repr_ = Box{std::move(lo), std::move(hi)};
  return pm;
}

ProbMeasure ProbMeasure::gaussian(int dim, double sigma) {
  if (dim < 1 || !(sigma > 0)) throw Error(Errc::InvalidArgument, "gaussian needs dim >= 1 and sigma > 0");
  ProbMeasure pm(dim);
  pm.repr_ = Gaussian{dim, sigma};
  return pm;
}

ProbMeasure ProbMeasure::linear_image(Eigen::MatrixXd map, ProbMeasure base) {
  if (map.cols() != base.dim() || map.rows() < 1) {
    throw Error(Errc::InvalidArgument, "linear map columns must equal the base dimension");
  }
  if (map.rows() > kMaxDim || base.dim() > kMaxDim) {
    throw Error(Errc::InvalidArgument, "linear images are limited to dimension 16");
  }
  ProbMeasure pm(static_cast<int>(map.rows()));
  const double c = conformal_scale(map);
  pm.repr_ = LinearImage{std::move(map), std::make_shared<const ProbMeasure>(std::move(base)), c};
  return pm;
}

MeasureKind ProbMeasure::kind() const noexcept {
  return std::visit(overloaded{
                        [](const Empirical&) { return MeasureKind::Empirical; },
                        [](const Radial&) { return MeasureKind::RadialAnalytic; },
                        [](const Box&) { return MeasureKind::FiniteVarianceAnalytic; },
                        [](const Gaussian&) { return MeasureKind::FiniteVarianceAnalytic; },
                        [](const LinearImage&) { return MeasureKind::LinearImage; },
                    },
                    repr_);
}

TruncatedMoments ProbMeasure::truncated(double t) const {
  if (!(t > 0)) throw Error(Errc::InvalidArgument, "truncation radius must be positive");
  const int d = dim_;
  return std::visit(
      overloaded{
          [&](const Empirical& e) {
            TruncatedMoments m = zero_moments(d);
            // closed ball: points with |x| == t count inside
            const auto k = static_cast<std::size_t>(
                std::upper_bound(e.sorted_norms.begin(), e.sorted_norms.end(), t) - e.sorted_norms.begin());
            const auto dd = static_cast<std::size_t>(d) * d;
            for (int a = 0; a < d; ++a) {
              for (int b = 0; b < d; ++b) m.second(a, b) = e.prefix_second[k * dd + a * d + b];
              m.first[a] = e.prefix_first[k * d + a];
            }
            m.tail_mass = std::max(0.0, e.prefix_mass.back() - e.prefix_mass[k]);
            return m;
          },
          [&](const Radial& r) {
            if (r.center.isZero(0.0)) return radial_centered(r.profile, r.direction, t);
            if (const auto* a = std::get_if<DirectionLaw::Atoms>(&r.direction.law())) {
              return shifted_atoms(r.profile, *a, r.center, t);
            }
            if (d == 2) return shifted_disk(r.profile, r.center, t);
            throw Error(Errc::UnsupportedKind,
                        "shifted radial law with uniform direction is supported only in d = 2");
          },
          [&](const Box& b) { return box_moments(b.lo, b.hi, t); },
          [&](const Gaussian& g) {
            TruncatedMoments m = zero_moments(d);
            const double z = t * t / (2.0 * g.sigma * g.sigma);
            m.second.diagonal().setConstant(g.sigma * g.sigma * boost::math::gamma_p(0.5 * d + 1.0, z));
            m.tail_mass = boost::math::gamma_q(0.5 * d, z);
            return m;
          },
          [&](const LinearImage& l) {
            if (!(l.conformal_scale > 0)) {
              throw Error(Errc::UnsupportedKind,
                          "truncated integrals of a linear image need a conformal map");
            }
            return map_moments(l.map, l.base->truncated(t / l.conformal_scale));
          },
      },
      repr_);
}

bool ProbMeasure::finite_second_moment() const {
  return std::visit(overloaded{
                        [](const Radial& r) { return r.profile.power_integral_converges(2.0, true); },
                        [](const LinearImage& l) { return l.base->finite_second_moment(); },
                        [](const auto&) { return true; },
                    },
                    repr_);
}

bool ProbMeasure::finite_first_moment() const {
  return std::visit(overloaded{
                        [](const Radial& r) { return r.profile.power_integral_converges(1.0, true); },
                        [](const LinearImage& l) { return l.base->finite_first_moment(); },
                        [](const auto&) { return true; },
                    },
                    repr_);
}

Eigen::MatrixXd ProbMeasure::sample(std::size_t n, Seed seed, std::string_view label) const {
  if (n < 1) throw Error(Errc::InvalidArgument, "sample size must be at least 1");
  // row-major so each draw is contiguous
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(static_cast<Eigen::Index>(n), dim_);
  const std::size_t blocks = (n + kSampleBlock - 1) / kSampleBlock;
  const std::string lab(label);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t b = 0; b < blocks; ++b) {
    PointSampler ps(*this);
    Engine eng = derive_stream(seed, lab, b);
    const std::size_t end = std::min(n, (b + 1) * kSampleBlock);
    for (std::size_t i = b * kSampleBlock; i < end; ++i) {
      ps.draw(eng, std::span<double>(out.data() + i * dim_, static_cast<std::size_t>(dim_)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// PointSampler

PointSampler::PointSampler(const ProbMeasure& m) : m_(m), point_(static_cast<std::size_t>(m.dim())) {
  if (const auto* l = std::get_if<ProbMeasure::LinearImage>(&m.repr_)) {
    scratch_.resize(static_cast<std::size_t>(l->base->dim()));
    base_ = std::make_unique<PointSampler>(*l->base);
  }
}

void PointSampler::draw(Engine& eng, std::span<double> out) {
  const int d = m_.dim();
  std::visit(overloaded{
                 [&](const ProbMeasure::Empirical& e) {
                   const double u = uniform01(eng) * e.cumulative_weight.back();
                   auto i = static_cast<std::size_t>(
                       std::upper_bound(e.cumulative_weight.begin(), e.cumulative_weight.end(), u) -
                       e.cumulative_weight.begin());
                   i = std::min(i, e.weights.size() - 1);
                   for (int j = 0; j < d; ++j) out[j] = e.points(static_cast<Eigen::Index>(i), j);
                 },
                 [&](const ProbMeasure::Radial& r) {
                   const double radius = r.sampler->draw(eng);
                   r.direction.draw(eng, out);
                   for (int j = 0; j < d; ++j) out[j] = r.center[j] + radius * out[j];
                 },
                 [&](const ProbMeasure::Box& b) {
                   for (int j = 0; j < d; ++j) out[j] = b.lo[j] + (b.hi[j] - b.lo[j]) * uniform01(eng);
                 },
                 [&](const ProbMeasure::Gaussian& g) {
                   for (int j = 0; j < d; ++j) out[j] = g.sigma * normal_(eng);
                 },
                 [&](const ProbMeasure::LinearImage& l) {
                   base_->draw(eng, scratch_);
                   const auto m = static_cast<int>(scratch_.size());
                   for (int i = 0; i < d; ++i) {
                     double s = 0;
                     for (int j = 0; j < m; ++j) s += l.map(i, j) * scratch_[j];
                     out[i] = s;
                   }
                 },
             },
             m_.repr_);
}

void PointSampler::accumulate(Engine& eng, std::size_t n, std::span<double> acc) {
  for (std::size_t k = 0; k < n; ++k) {
    draw(eng, point_);
    for (std::size_t j = 0; j < point_.size(); ++j) acc[j] += point_[j];
  }
}

// ---------------------------------------------------------------------------
// LevyMeasure

LevyMeasure LevyMeasure::radial(RadialProfile profile, DirectionLaw direction) {
  if (!profile.power_integral_converges(2.0, false)) {
    throw Error(Errc::NotALevyMeasure, "integral of |x|^2 near the origin diverges");
  }
  if (!profile.power_integral_converges(0.0, true)) {
    throw Error(Errc::NotALevyMeasure, "mass of {|x| > 1} is infinite");
  }
  LevyMeasure lm(direction.dim());
  lm.repr_ = Radial{std::move(profile), std::move(direction)};
  const double v = lm.levy_integral();
  if (!std::isfinite(v)) throw Error(Errc::NotALevyMeasure, "integral of min(|x|^2, 1) is not finite");
  return lm;
}

LevyMeasure LevyMeasure::radial_from_lebesgue(const RadialShape& rho, int dim) {
  if (dim < 1) throw Error(Errc::InvalidArgument, "dimension must be at least 1");
  const double area = sphere_area(dim);
  RadialShape g = std::visit(
      overloaded{
          [&](const PowerLawShape& p) -> RadialShape {
            PowerLawShape q = p;
            q.coef *= area;
            q.exponent -= dim - 1;
            return q;
          },
          [&](const LogCorrectedShape& p) -> RadialShape {
            LogCorrectedShape q = p;
            q.coef *= area;
            q.exponent -= dim - 1;
            return q;
          },
          [&](const CustomShape& p) -> RadialShape {
            CustomShape q = p;
            const double la = std::log(area);
            q.log_density = [f = p.log_density, la, dim](double u) { return f(u) + la + (dim - 1) * u; };
            return q;
          },
      },
      rho);
  return radial(RadialProfile(std::move(g)), DirectionLaw::uniform(dim));
}

LevyMeasure LevyMeasure::atoms(Eigen::MatrixXd points, std::vector<double> masses) {
  if (points.rows() < 1 || static_cast<std::size_t>(points.rows()) != masses.size()) {
    throw Error(Errc::InvalidArgument, "atoms need matching nonempty points and masses");
  }
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    if (!(points.row(i).norm() > 0)) throw Error(Errc::NotALevyMeasure, "atom at the origin");
    if (!(masses[i] > 0) || !std::isfinite(masses[i])) {
      throw Error(Errc::InvalidArgument, "atom masses must be positive and finite");
    }
  }
  LevyMeasure lm(static_cast<int>(points.cols()));
  lm.repr_ = Atoms{std::move(points), std::move(masses)};
  return lm;
}

LevyMeasure LevyMeasure::linear_image(Eigen::MatrixXd map, LevyMeasure base) {
  if (map.cols() != base.dim() || map.rows() < 1) {
    throw Error(Errc::InvalidArgument, "linear map columns must equal the base dimension");
  }
  if (map.rows() > kMaxDim || base.dim() > kMaxDim) {
    throw Error(Errc::InvalidArgument, "linear images are limited to dimension 16");
  }
  const double c = conformal_scale(map);
  if (!(c > 0)) throw Error(Errc::UnsupportedKind, "Levy linear images need a conformal map");
  LevyMeasure lm(static_cast<int>(map.rows()));
  lm.repr_ = LinearImage{std::move(map), std::make_shared<const LevyMeasure>(std::move(base)), c};
  return lm;
}

MeasureKind LevyMeasure::kind() const noexcept {
  if (std::holds_alternative<LinearImage>(repr_)) return MeasureKind::LinearImage;
  if (std::holds_alternative<Atoms>(repr_)) return MeasureKind::Empirical;
  return MeasureKind::RadialAnalytic;
}

TruncatedMoments LevyMeasure::truncated(double t) const {
  if (!(t > 0)) throw Error(Errc::InvalidArgument, "truncation radius must be positive");
  const int d = dim_;
  return std::visit(overloaded{
                        [&](const Radial& r) { return radial_centered(r.profile, r.direction, t); },
                        [&](const Atoms& a) {
                          TruncatedMoments m = zero_moments(d);
                          for (Eigen::Index i = 0; i < a.points.rows(); ++i) {
                            const Eigen::VectorXd x = a.points.row(i).transpose();
                            if (x.norm() <= t) {
                              m.second += a.masses[i] * x * x.transpose();
                              m.first += a.masses[i] * x;
                            } else {
                              m.tail_mass += a.masses[i];
                            }
                          }
                          return m;
                        },
                        [&](const LinearImage& l) {
                          return map_moments(l.map, l.base->truncated(t / l.conformal_scale));
                        },
                    },
                    repr_);
}

double LevyMeasure::levy_integral() const {
  const TruncatedMoments m = truncated(1.0);
  return m.second.trace() + m.tail_mass;
}

double LevyMeasure::eta_tail_moment(double eta, double s) const {
  if (!(s > 0)) throw Error(Errc::InvalidArgument, "tail radius must be positive");
  return std::visit(overloaded{
                        [&](const Radial& r) {
                          if (s >= r.profile.r_max()) return 0.0;
                          return r.profile.power_integral_or_inf(eta, s, kInf);
                        },
                        [&](const Atoms& a) {
                          double acc = 0;
                          for (Eigen::Index i = 0; i < a.points.rows(); ++i) {
                            const double n = a.points.row(i).norm();
                            if (n > s) acc += a.masses[i] * std::pow(n, eta);
                          }
                          return acc;
                        },
                        [&](const LinearImage& l) {
                          const double c = l.conformal_scale;
                          return std::pow(c, eta) * l.base->eta_tail_moment(eta, s / c);
                        },
                    },
                    repr_);
}

Eigen::VectorXd LevyMeasure::compensated_first_moment(double cut) const {
  return compensated_first_scaled(1.0, cut);
}

// int x (1{|x| <= cut} - 1/(1 + scale^2 |x|^2)) M(dx)
Eigen::VectorXd LevyMeasure::compensated_first_scaled(double scale, double cut) const {
  if (!(cut > 0) || !(scale > 0)) throw Error(Errc::InvalidArgument, "cut and scale must be positive");
  const int d = dim_;
  return std::visit(
      overloaded{
          [&](const Radial& r) -> Eigen::VectorXd {
            const Eigen::VectorXd e = r.direction.mean();
            if (e.isZero(0.0)) return Eigen::VectorXd::Zero(d);
            const double ls = std::log(scale);
            // r * s^2 r^2 / (1 + s^2 r^2) inside the cut, r / (1 + s^2 r^2) outside
            auto inner = [ls](double u) { return 3.0 * u + 2.0 * ls - softplus(2.0 * ls + 2.0 * u); };
            auto outer = [ls](double u) { return u - softplus(2.0 * ls + 2.0 * u); };
            const double pos = r.profile.weighted_integral(inner, 0.0, cut);
            const double neg = r.profile.weighted_integral(outer, cut, kInf);
            return e * (pos - neg);
          },
          [&](const Atoms& a) -> Eigen::VectorXd {
            Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
            for (Eigen::Index i = 0; i < a.points.rows(); ++i) {
              const Eigen::VectorXd x = a.points.row(i).transpose();
              const double n = x.norm();
              const double w = (n <= cut ? 1.0 : 0.0) - 1.0 / (1.0 + scale * scale * n * n);
              acc += a.masses[i] * w * x;
            }
            return acc;
          },
          [&](const LinearImage& l) -> Eigen::VectorXd {
            const double c = l.conformal_scale;
            return l.map * l.base->compensated_first_scaled(scale * c, cut / c);
          },
      },
      repr_);
}

double LevyMeasure::support_floor() const {
  return std::visit(overloaded{
                        [](const Radial& r) { return r.profile.r_min(); },
                        [](const Atoms& a) { return a.points.rowwise().norm().minCoeff(); },
                        [](const LinearImage& l) { return l.conformal_scale * l.base->support_floor(); },
                    },
                    repr_);
}

double LevyMeasure::support_ceiling() const {
  return std::visit(overloaded{
                        [](const Radial& r) { return r.profile.r_max(); },
                        [](const Atoms& a) { return a.points.rowwise().norm().maxCoeff(); },
                        [](const LinearImage& l) { return l.conformal_scale * l.base->support_ceiling(); },
                    },
                    repr_);
}

LevyMeasure LevyMeasure::rescaled(double t, double a) const {
  if (!(t > 0) || !(a > 0)) throw Error(Errc::InvalidArgument, "rescaling needs t > 0 and a > 0");
  LevyMeasure lm(dim_);
  lm.repr_ = std::visit(
      overloaded{
          [&](const Radial& r) -> decltype(repr_) { return Radial{r.profile.rescaled(a, t), r.direction}; },
          [&](const Atoms& at) -> decltype(repr_) {
            std::vector<double> masses(at.masses);
            for (double& m : masses) m *= t;
            return Atoms{at.points * a, std::move(masses)};
          },
          [&](const LinearImage& l) -> decltype(repr_) {
            return LinearImage{l.map, std::make_shared<const LevyMeasure>(l.base->rescaled(t, a)),
                               l.conformal_scale};
          },
      },
      repr_);
  return lm;
}

// ---------------------------------------------------------------------------
// JumpSampler

JumpSampler::JumpSampler(const LevyMeasure& m, double cutoff) : dim_(m.dim()), m_(&m) {
  if (!(cutoff > 0)) throw Error(Errc::InfiniteIntensity, "jump cutoff must be positive");
  std::visit(overloaded{
                 [&](const LevyMeasure::Radial& r) {
                   if (cutoff >= r.profile.r_max()) return;
                   intensity_ = m.tail_mass(cutoff);
                   if (!std::isfinite(intensity_)) {
                     throw Error(Errc::InfiniteIntensity, "mass above the cutoff is infinite");
                   }
                   if (intensity_ > 0) radial_ = std::make_shared<const RadialSampler>(r.profile, cutoff);
                 },
                 [&](const LevyMeasure::Atoms& a) {
                   double acc = 0;
                   for (Eigen::Index i = 0; i < a.points.rows(); ++i) {
                     if (a.points.row(i).norm() > cutoff) {
                       acc += a.masses[i];
                       atom_index_.push_back(static_cast<std::size_t>(i));
                       atom_cumulative_.push_back(acc);
                     }
                   }
                   intensity_ = acc;
                 },
                 [&](const LevyMeasure::LinearImage& l) {
                   base_ = std::make_unique<JumpSampler>(*l.base, cutoff / l.conformal_scale);
                   intensity_ = base_->intensity();
                 },
             },
             m.repr_);
}

void JumpSampler::draw(Engine& eng, std::span<double> out) const {
  std::visit(overloaded{
                 [&](const LevyMeasure::Radial& r) {
                   const double radius = radial_->draw(eng);
                   r.direction.draw(eng, out);
                   for (int j = 0; j < dim_; ++j) out[j] *= radius;
                 },
                 [&](const LevyMeasure::Atoms& a) {
                   const double u = uniform01(eng) * atom_cumulative_.back();
                   auto k = static_cast<std::size_t>(
                       std::upper_bound(atom_cumulative_.begin(), atom_cumulative_.end(), u) -
                       atom_cumulative_.begin());
                   k = std::min(k, atom_index_.size() - 1);
                   const auto i = static_cast<Eigen::Index>(atom_index_[k]);
                   for (int j = 0; j < dim_; ++j) out[j] = a.points(i, j);
                 },
                 [&](const LevyMeasure::LinearImage& l) {
                   double buf[kMaxDim];
                   const auto m = static_cast<int>(l.map.cols());
                   base_->draw(eng, std::span<double>(buf, static_cast<std::size_t>(m)));
                   for (int i = 0; i < dim_; ++i) {
                     double s = 0;
                     for (int j = 0; j < m; ++j) s += l.map(i, j) * buf[j];
                     out[i] = s;
                   }
                 },
             },
             m_->repr_);
}

LevyTriplet::LevyTriplet(LevyMeasure m, Eigen::VectorXd b) : measure(std::move(m)), drift(std::move(b)) {
  if (drift.size() == 0) drift = Eigen::VectorXd::Zero(measure.dim());
  if (drift.size() != measure.dim()) throw Error(Errc::InvalidArgument, "drift dimension differs from the measure");
}

// ---------------------------------------------------------------------------
// CSV

ProbMeasure load_empirical_csv(std::istream& is, bool has_weight_column) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        row.push_back(std::stod(cell, &pos));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header
      throw Error(Errc::Io, "non-numeric cell on line " + std::to_string(lineno));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(Errc::Io, "ragged row on line " + std::to_string(lineno));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(Errc::Io, "no data rows");
  const std::size_t cols = rows.front().size();
  const std::size_t d = has_weight_column ? cols - 1 : cols;
  if (d < 1) throw Error(Errc::Io, "no coordinate columns");
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  std::vector<double> w;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    if (has_weight_column) w.push_back(rows[i][d]);
  }
  return ProbMeasure::empirical(std::move(pts), std::move(w));
}

void write_points_csv(std::ostream& os, const Eigen::MatrixXd& points) {
  char buf[32];
  for (Eigen::Index j = 0; j < points.cols(); ++j) os << (j ? ",x" : "x") << j + 1;
  os << '\n';
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", points(i, j));
      if (j) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace gausslim
