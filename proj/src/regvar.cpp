#include "gausslim/regvar.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "gausslim/errors.hpp"

namespace gausslim {

std::string_view to_string(LimitPoint c) noexcept {
  return c == LimitPoint::Zero ? "zero" : "infinity";
}

LimitPoint limit_point_from_string(std::string_view s) {
  if (s == "zero" || s == "0") return LimitPoint::Zero;
  if (s == "infinity" || s == "inf") return LimitPoint::Infinity;
  throw Error(Errc::InvalidArgument, "limit point must be 'zero' or 'infinity', got '" +
                                         std::string(s) + "'");
}

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  if (!(lo > 0.0) || !(hi > lo) || per_decade < 1) {
    throw Error(Errc::InvalidArgument, "log_grid needs 0 < lo < hi and per_decade >= 1");
  }
  const double l0 = std::log10(lo);
  const double l1 = std::log10(hi);
  const auto n = static_cast<std::size_t>(std::ceil((l1 - l0) * per_decade - 1e-9));
  std::vector<double> g(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    g[i] = std::pow(10.0, l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(n));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

RVFunction::RVFunction(std::vector<double> grid, std::vector<double> values, LimitPoint limit)
    : grid_(std::move(grid)), values_(std::move(values)), limit_(limit) {
  if (grid_.size() != values_.size()) {
    throw Error(Errc::InvalidArgument, "grid and values differ in length");
  }
  if (grid_.size() < kMinPoints) {
    throw Error(Errc::GridTooNarrow, "need at least 8 grid points, got " +
                                         std::to_string(grid_.size()));
  }
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (!(grid_[i] > 0.0) || !std::isfinite(grid_[i])) {
      throw Error(Errc::InvalidArgument, "grid entries must be positive and finite");
    }
    if (i > 0 && !(grid_[i] > grid_[i - 1])) {
      throw Error(Errc::InvalidArgument, "grid must be strictly increasing");
    }
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) {
      std::ostringstream os;
      os << "value " << values_[i] << " at abscissa " << grid_[i];
      throw Error(Errc::NonPositiveValues, os.str());
    }
  }
  if (decades() < kMinDecades - 1e-9) {
    std::ostringstream os;
    os << "grid spans " << decades() << " decades, need " << kMinDecades;
    throw Error(Errc::GridTooNarrow, os.str());
  }
}

RVFunction RVFunction::tabulate(const std::function<double(double)>& f, double lo, double hi,
                                LimitPoint limit, int per_decade) {
  auto g = log_grid(lo, hi, per_decade);
  std::vector<double> v(g.size());
  std::transform(g.begin(), g.end(), v.begin(), f);
  return RVFunction(std::move(g), std::move(v), limit);
}

double RVFunction::decades() const noexcept {
  return std::log10(grid_.back() / grid_.front());
}

bool RVFunction::contains(double x) const noexcept {
  const double slack = 1e-12;
  return x >= grid_.front() * (1 - slack) && x <= grid_.back() * (1 + slack);
}

double RVFunction::operator()(double x) const {
  if (!contains(x)) {
    std::ostringstream os;
    os << "abscissa " << x << " outside [" << grid_.front() << ", " << grid_.back() << "]";
    throw Error(Errc::OutOfRange, os.str());
  }
  auto it = std::lower_bound(grid_.begin(), grid_.end(), x);
  if (it == grid_.end()) return values_.back();
  auto i = static_cast<std::size_t>(it - grid_.begin());
  if (*it == x || i == 0) return values_[i];
  const double u = (std::log(x) - std::log(grid_[i - 1])) / (std::log(grid_[i]) - std::log(grid_[i - 1]));
  return std::exp(std::log(values_[i - 1]) + u * (std::log(values_[i]) - std::log(values_[i - 1])));
}

RVFunction reciprocal_transform(const RVFunction& f) {
  const auto g = f.grid();
  const auto v = f.values();
  const std::size_t n = g.size();
  std::vector<double> grid(n), values(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = 1.0 / g[n - 1 - i];
    values[i] = 1.0 / v[n - 1 - i];
  }
  return RVFunction(std::move(grid), std::move(values), flipped(f.limit_point()));
}

namespace {

RVDiagnosis diagnose_at_infinity(const RVFunction& f, const RVOptions& opts) {
  const auto g = f.grid();
  const auto v = f.values();
  const std::size_t n = g.size();
  const std::size_t m = std::min(
      n, std::max<std::size_t>(RVFunction::kMinPoints,
                               static_cast<std::size_t>(std::ceil(opts.trailing_fraction * n))));

  double sx = 0, sy = 0;
  for (std::size_t i = n - m; i < n; ++i) {
    sx += std::log(g[i]);
    sy += std::log(v[i]);
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = n - m; i < n; ++i) {
    const double dx = std::log(g[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(v[i]) - my);
  }
  RVDiagnosis d;
  d.index_estimate = sxy / sxx;
  double ssr = 0;
  for (std::size_t i = n - m; i < n; ++i) {
    const double r = std::log(v[i]) - my - d.index_estimate * (std::log(g[i]) - mx);
    ssr += r * r;
  }
  d.index_stderr = m > 2 ? std::sqrt(ssr / static_cast<double>(m - 2) / sxx) : 0.0;

  bool ratios_ok = true;
  const double top = g.back();
  for (double s : opts.scales) {
    if (!(s > 1.0)) throw Error(Errc::InvalidArgument, "ratio scales must exceed 1");
    const auto usable = static_cast<std::size_t>(
        std::upper_bound(g.begin(), g.end(), top / s * (1 + 1e-12)) - g.begin());
    if (usable < RVFunction::kMinPoints) {
      std::ostringstream os;
      os << "scale " << s << " leaves only " << usable << " usable grid points";
      throw Error(Errc::InvalidArgument, os.str());
    }
    const double ratio = v.back() / f(top / s);
    d.ratio_curve.push_back({s, ratio});
    ratios_ok = ratios_ok && std::abs(ratio - 1.0) <= opts.tol_ratio;
  }
  d.is_slowly_varying = std::abs(d.index_estimate) < opts.tol_slow && ratios_ok;
  return d;
}

}  // namespace

RVDiagnosis estimate_rv_index(const RVFunction& f, const RVOptions& opts) {
  if (f.limit_point() == LimitPoint::Zero) return diagnose_at_infinity(reciprocal_transform(f), opts);
  return diagnose_at_infinity(f, opts);
}

std::vector<double> monotone_envelope(std::span<const double> values) {
  std::vector<double> h(values.begin(), values.end());
  for (std::size_t i = h.size(); i-- > 1;) h[i - 1] = std::min(h[i - 1], h[i]);
  return h;
}

namespace {

RVFunction invert_at_infinity(const RVFunction& f, const InverseOptions& opts) {
  const auto g = f.grid();
  const auto hull = monotone_envelope(f.values());
  const double lo = hull.front();
  const double hi = hull.back();
  if (!(hi > lo) || std::log10(hi / lo) < RVFunction::kMinDecades - 1e-9) {
    std::ostringstream os;
    os << "value range [" << lo << ", " << hi << "] spans fewer than "
       << RVFunction::kMinDecades << " decades";
    throw Error(Errc::ValueRangeTooNarrow, os.str());
  }
  auto xs = log_grid(lo, hi, opts.per_decade);
  std::vector<double> ys(xs.size());
  const std::size_t n = hull.size();
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double x = xs[k];
    // first index with H > x
    auto i = static_cast<std::size_t>(std::upper_bound(hull.begin(), hull.end(), x) - hull.begin());
    if (i == 0) {
      ys[k] = g.front();
    } else if (i >= n) {
      ys[k] = g.back();
    } else {
      const double lh0 = std::log(hull[i - 1]), lh1 = std::log(hull[i]);
      const double u = (std::log(x) - lh0) / (lh1 - lh0);
      ys[k] = std::exp(std::log(g[i - 1]) + u * (std::log(g[i]) - std::log(g[i - 1])));
    }
  }
  // strict monotonicity of the abscissa is guaranteed by log_grid; ordinates
  // are nondecreasing by construction
  return RVFunction(std::move(xs), std::move(ys), LimitPoint::Infinity);
}

}  // namespace

RVFunction asymptotic_inverse(const RVFunction& f, double assume_index, const InverseOptions& opts) {
  if (!(assume_index > 0.0)) {
    throw Error(Errc::NonPositiveIndex, "asymptotic inversion needs a positive index");
  }
  const auto diag = estimate_rv_index(f);
  if (std::abs(diag.index_estimate - assume_index) > opts.index_tol) {
    std::ostringstream os;
    os << "estimated index " << diag.index_estimate << " differs from assumed " << assume_index;
    throw Error(Errc::IndexMismatch, os.str());
  }
  if (f.limit_point() == LimitPoint::Zero) {
    // f^{<-}(x) = 1 / h^{<-}(1/x) with h(x) = 1/f(1/x)
    return reciprocal_transform(invert_at_infinity(reciprocal_transform(f), opts));
  }
  return invert_at_infinity(f, opts);
}

void write_csv(std::ostream& os, const RVFunction& f) {
  os << "abscissa,ordinate\n" << std::setprecision(17);
  for (std::size_t i = 0; i < f.size(); ++i) os << f.grid()[i] << ',' << f.values()[i] << '\n';
}

RVFunction read_rv_csv(std::istream& is, LimitPoint limit) {
  std::vector<double> g, v;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(Errc::InvalidArgument, "expected two columns: " + line);
    try {
      const double x = std::stod(line.substr(0, comma));
      const double y = std::stod(line.substr(comma + 1));
      g.push_back(x);
      v.push_back(y);
    } catch (const std::invalid_argument&) {
      if (!first) throw Error(Errc::InvalidArgument, "unparsable row: " + line);
    }
    first = false;
  }
  return RVFunction(std::move(g), std::move(v), limit);
}

}  // namespace gausslim
