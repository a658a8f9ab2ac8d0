#include "gausslim/radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "gausslim/errors.hpp"
#include "gausslim/quadrature.hpp"
#include "gausslim/regvar.hpp"

namespace gausslim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_log(double r) { return r > 0 ? std::log(r) : -kInf; }

struct BaseSupport {
  double lo, hi;
};

BaseSupport base_support(const RadialShape& s) {
  return std::visit([](const auto& sh) { return BaseSupport{sh.r_min, sh.r_max}; }, s);
}

double base_log_density(const RadialShape& s, double u) {
  return std::visit(
      [u](const auto& sh) -> double {
        using T = std::decay_t<decltype(sh)>;
        if (u < safe_log(sh.r_min) || u > safe_log(sh.r_max)) return -kInf;
        if constexpr (std::is_same_v<T, PowerLawShape>) {
          return std::log(sh.coef) - sh.exponent * u;
        } else if constexpr (std::is_same_v<T, LogCorrectedShape>) {
          if (!(u < 0)) return -kInf;
          return std::log(sh.coef) - sh.exponent * u - sh.log_power * std::log(-u);
        } else {
          return sh.log_density(u);
        }
      },
      s);
}

void validate_shape(const RadialShape& s) {
  std::visit(
      [](const auto& sh) {
        using T = std::decay_t<decltype(sh)>;
        if (!(sh.r_min >= 0) || !(sh.r_max > sh.r_min)) {
          throw Error(Errc::InvalidArgument, "radial support needs 0 <= r_min < r_max");
        }
        if constexpr (std::is_same_v<T, PowerLawShape>) {
          if (!(sh.coef > 0)) throw Error(Errc::InvalidArgument, "power-law coefficient must be positive");
        } else if constexpr (std::is_same_v<T, LogCorrectedShape>) {
          if (!(sh.coef > 0)) throw Error(Errc::InvalidArgument, "coefficient must be positive");
          if (!(sh.r_max < 1.0)) throw Error(Errc::InvalidArgument, "log-corrected shape needs r_max < 1");
        } else {
          if (!sh.log_density) throw Error(Errc::InvalidArgument, "custom shape has no density");
        }
      },
      s);
}

}  // namespace

RadialProfile::RadialProfile(RadialShape shape) : shape_(std::move(shape)) { validate_shape(shape_); }

RadialProfile RadialProfile::rescaled(double scale, double mass_factor) const {
  if (!(scale > 0) || !(mass_factor > 0)) {
    throw Error(Errc::InvalidArgument, "rescaling needs positive scale and mass factor");
  }
  RadialProfile p = *this;
  p.log_scale_ += std::log(scale);
  p.log_mass_ += std::log(mass_factor);
  return p;
}

double RadialProfile::r_min() const noexcept { return base_support(shape_).lo * std::exp(log_scale_); }
double RadialProfile::r_max() const noexcept { return base_support(shape_).hi * std::exp(log_scale_); }

double RadialProfile::log_density(double u) const {
  return log_mass_ - log_scale_ + base_log_density(shape_, u - log_scale_);
}

double RadialProfile::density(double r) const { return r > 0 ? std::exp(log_density(std::log(r))) : 0.0; }

double RadialProfile::power_integral(double k, double a, double b) const {
  const double lo = std::max(a, r_min());
  const double hi = std::min(b, r_max());
  if (!(hi > lo)) return 0.0;
  auto f = [this, k](double u) { return std::exp((k + 1.0) * u + log_density(u)); };
  return quad::checked(f, safe_log(lo), std::log(hi), quad::kDefaultRelTol, "radial moment");
}

double RadialProfile::weighted_integral(const std::function<double(double)>& log_weight, double a,
                                        double b) const {
  const double lo = std::max(a, r_min());
  const double hi = std::min(b, r_max());
  if (!(hi > lo)) return 0.0;
  auto f = [this, &log_weight](double u) { return std::exp(u + log_weight(u) + log_density(u)); };
  return quad::checked(f, safe_log(lo), std::log(hi), quad::kDefaultRelTol, "weighted radial integral");
}

bool RadialProfile::power_integral_converges(double k, bool toward_infinity) const {
  const auto [lo0, hi0] = base_support(shape_);
  if (toward_infinity && std::isfinite(hi0)) return true;
  if (!toward_infinity && lo0 > 0) return true;
  if (const auto* p = std::get_if<PowerLawShape>(&shape_)) {
    const double slope = k + 1.0 - p->exponent;
    return toward_infinity ? slope < 0 : slope > 0;
  }
  if (const auto* p = std::get_if<LogCorrectedShape>(&shape_)) {
    // only the end at zero can be open
    const double slope = k + 1.0 - p->exponent;
    return slope > 0 || (slope == 0 && p->log_power > 1.0);
  }
  auto f = [this, k](double u) { return std::exp((k + 1.0) * u + log_density(u)); };
  if (toward_infinity) {
    const double start = std::max(r_min(), 1.0);
    return quad::converges(f, std::log(start), kInf);
  }
  const double stop = std::min(r_max(), 1.0);
  return quad::converges(f, -kInf, std::log(stop));
}

double RadialProfile::power_integral_or_inf(double k, double a, double b) const {
  const double lo = std::max(a, r_min());
  const double hi = std::min(b, r_max());
  if (!(hi > lo)) return 0.0;
  if (lo == 0.0 && !power_integral_converges(k, false)) return kInf;
  if (std::isinf(hi) && !power_integral_converges(k, true)) return kInf;
  return power_integral(k, lo, hi);
}

// ---------------------------------------------------------------------------

RadialSampler::RadialSampler(const RadialProfile& profile, double lower) : lower_(lower) {
  lo_ = std::max(lower, profile.r_min());
  hi_ = profile.r_max();
  if (!(hi_ > lo_)) return;

  const bool open_low = lo_ == 0.0;
  if (open_low && !profile.power_integral_converges(0.0, false)) {
    throw Error(Errc::InfiniteIntensity, "radial mass diverges at the origin");
  }
  if (std::isinf(hi_) && !profile.power_integral_converges(0.0, true)) {
    throw Error(Errc::InfiniteIntensity, "radial mass diverges at infinity");
  }
  mass_ = profile.power_integral(0.0, lo_, hi_);

  if (const auto* p = std::get_if<PowerLawShape>(&profile.shape()); p && lo_ > 0) {
    analytic_ = true;
    exponent_ = p->exponent;
    return;
  }

  // Table bounds: expand by decades until the neglected mass is negligible.
  constexpr double kNeglect = 1e-17;
  double bottom = lo_;
  if (open_low) {
    bottom = std::min(hi_, 1.0) * 0.1;
    while (profile.power_integral(0.0, 0.0, bottom) > kNeglect * mass_ && bottom > 1e-300) bottom *= 0.1;
  }
  double top = hi_;
  if (std::isinf(hi_)) {
    top = std::max(bottom, 1.0) * 10.0;
    while (profile.power_integral(0.0, top, kInf) > kNeglect * mass_ && top < 1e300) top *= 10.0;
  }
  radii_ = log_grid(bottom, top, 256);
  const std::size_t n = radii_.size();
  std::vector<double> cell(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) cell[i] = profile.power_integral(0.0, radii_[i - 1], radii_[i]);
  tail_.assign(n, 0.0);
  tail_[n - 1] = std::isinf(hi_) ? profile.power_integral(0.0, top, kInf) : 0.0;
  for (std::size_t i = n - 1; i-- > 0;) tail_[i] = tail_[i + 1] + cell[i + 1];
  mass_ = tail_[0];

  cell_exp_.assign(n, 1.0);
  for (std::size_t i = 1; i < n; ++i) {
    // density evaluated just inside the cell to stay within the support
    const double r0 = radii_[i - 1] * (1 + 1e-12), r1 = radii_[i] * (1 - 1e-12);
    const double g0 = profile.log_density(std::log(r0)), g1 = profile.log_density(std::log(r1));
    const double beta = (g1 - g0) / (std::log(r1) - std::log(r0));
    cell_exp_[i] = std::isfinite(beta) ? beta + 1.0 : 1.0;
  }
  beyond_exp_ = cell_exp_[n - 1];
}

double RadialSampler::draw(Engine& eng) const {
  const double u = uniform_open0(eng);  // tail fraction
  if (analytic_) {
    const double gamma = 1.0 - exponent_;
    if (std::abs(gamma) < 1e-14) {
      return std::exp(std::log(hi_) + u * (std::log(lo_) - std::log(hi_)));
    }
    if (std::isinf(hi_)) return lo_ * std::pow(u, 1.0 / gamma);
    const double top = std::pow(hi_, gamma), bot = std::pow(lo_, gamma);
    return std::pow(top + u * (bot - top), 1.0 / gamma);
  }
  const double target = u * tail_[0];
  const std::size_t n = tail_.size();
  if (target < tail_[n - 1]) {
    if (beyond_exp_ >= 0) return radii_[n - 1];
    return radii_[n - 1] * std::pow(target / tail_[n - 1], 1.0 / beyond_exp_);
  }
  // first i with tail_[i] <= target, tail_ is nonincreasing
  auto it = std::partition_point(tail_.begin(), tail_.end(), [target](double t) { return t > target; });
  auto i = static_cast<std::size_t>(it - tail_.begin());
  if (i == 0) return radii_[0];
  const double cell_mass = tail_[i - 1] - tail_[i];
  const double f = cell_mass > 0 ? (tail_[i - 1] - target) / cell_mass : 0.5;
  const double ratio = radii_[i] / radii_[i - 1];
  const double gamma = cell_exp_[i];
  double x;
  if (std::abs(gamma) < 1e-9) {
    x = std::pow(ratio, f);
  } else {
    x = std::pow(1.0 + f * (std::pow(ratio, gamma) - 1.0), 1.0 / gamma);
  }
  return std::clamp(radii_[i - 1] * x, radii_[i - 1], radii_[i]);
}

// ---------------------------------------------------------------------------

DirectionLaw::DirectionLaw(int dim, std::variant<Uniform, Atoms> law) : dim_(dim), law_(std::move(law)) {
  build_cumulative();
}

DirectionLaw DirectionLaw::uniform(int dim) {
  if (dim < 1) throw Error(Errc::InvalidArgument, "dimension must be at least 1");
  if (dim == 1) {
    // the unit sphere in R^1 is {-1, +1}
    return atoms({Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, -1.0)}, {0.5, 0.5});
  }
  return DirectionLaw(dim, Uniform{dim});
}

DirectionLaw DirectionLaw::atoms(std::vector<Eigen::VectorXd> directions, std::vector<double> weights) {
  if (directions.empty() || directions.size() != weights.size()) {
    throw Error(Errc::InvalidArgument, "direction atoms need matching nonempty vectors and weights");
  }
  const auto dim = static_cast<int>(directions.front().size());
  double total = 0;
  for (std::size_t i = 0; i < directions.size(); ++i) {
    if (directions[i].size() != dim) throw Error(Errc::InvalidArgument, "direction atoms differ in dimension");
    const double norm = directions[i].norm();
    if (!(norm > 0)) throw Error(Errc::InvalidArgument, "direction atom is zero");
    directions[i] /= norm;
    if (!(weights[i] >= 0)) throw Error(Errc::InvalidArgument, "direction weights must be nonnegative");
    total += weights[i];
  }
  if (!(total > 0)) throw Error(Errc::InvalidArgument, "direction weights sum to zero");
  for (double& w : weights) w /= total;
  return DirectionLaw(dim, Atoms{std::move(directions), std::move(weights)});
}

void DirectionLaw::build_cumulative() {
  if (const auto* a = std::get_if<Atoms>(&law_)) {
    cumulative_.resize(a->weights.size());
    double acc = 0;
    for (std::size_t i = 0; i < a->weights.size(); ++i) cumulative_[i] = acc += a->weights[i];
    cumulative_.back() = 1.0;
  }
}

Eigen::MatrixXd DirectionLaw::second_moment() const {
  if (is_uniform()) return Eigen::MatrixXd::Identity(dim_, dim_) / dim_;
  const auto& a = std::get<Atoms>(law_);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(dim_, dim_);
  for (std::size_t i = 0; i < a.directions.size(); ++i) {
    s += a.weights[i] * a.directions[i] * a.directions[i].transpose();
  }
  return s;
}

Eigen::VectorXd DirectionLaw::mean() const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(dim_);
  if (is_uniform()) return m;
  const auto& a = std::get<Atoms>(law_);
  for (std::size_t i = 0; i < a.directions.size(); ++i) m += a.weights[i] * a.directions[i];
  // symmetric atom sets should give an exact zero
  for (int j = 0; j < dim_; ++j) {
    if (std::abs(m[j]) < 1e-15) m[j] = 0.0;
  }
  return m;
}

void DirectionLaw::draw(Engine& eng, std::span<double> out) const {
  if (is_uniform()) {
    if (dim_ == 2) {
      const double theta = 2.0 * std::numbers::pi * uniform01(eng);
      out[0] = std::cos(theta);
      out[1] = std::sin(theta);
      return;
    }
    std::normal_distribution<double> normal;
    double norm2 = 0;
    do {
      norm2 = 0;
      for (int j = 0; j < dim_; ++j) {
        out[j] = normal(eng);
        norm2 += out[j] * out[j];
      }
    } while (norm2 == 0.0);
    const double inv = 1.0 / std::sqrt(norm2);
    for (int j = 0; j < dim_; ++j) out[j] *= inv;
    return;
  }
  const auto& a = std::get<Atoms>(law_);
  std::size_t i = 0;
  if (a.directions.size() > 1) {
    const double u = uniform01(eng);
    i = static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin());
    i = std::min(i, a.directions.size() - 1);
  }
  for (int j = 0; j < dim_; ++j) out[j] = a.directions[i][j];
}

double sphere_area(int dim) {
  const double h = 0.5 * dim;
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

}  // namespace gausslim
