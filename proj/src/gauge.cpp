#include "qclab/gauge.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>

#include "qclab/error.hpp"
#include "qclab/report.hpp"

namespace qclab {

namespace {

void require_domain(long double t) {
  if (!(t >= 1.0L)) throw DomainError("gauge argument must be >= 1");
}

}  // namespace

ConvexGauge ConvexGauge::linear() { return {GaugeKind::linear, 1.0, 0.0}; }
ConvexGauge ConvexGauge::square() { return {GaugeKind::square, 2.0, 2.0}; }
ConvexGauge ConvexGauge::flat() { return {GaugeKind::flat, 1.0, 0.0}; }

ConvexGauge ConvexGauge::power(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidInput("power gauge needs p >= 1");
  return {GaugeKind::power, p, p >= 2.0 ? p * (p - 1.0) : 0.0};
}

ConvexGauge ConvexGauge::parse(const std::string& name) {
  if (name == "linear") return linear();
  if (name == "square") return square();
  if (name == "flat") return flat();
  if (name.rfind("power:", 0) == 0) {
    double p = 0.0;
    const char* first = name.data() + 6;
    const char* last = name.data() + name.size();
    const auto res = std::from_chars(first, last, p);
    if (res.ec != std::errc{} || res.ptr != last) throw InvalidInput("bad power exponent in " + name);
    return power(p);
  }
  throw InvalidInput("unknown gauge '" + name + "' (linear|square|power:p|flat)");
}

std::string ConvexGauge::name() const {
  switch (kind_) {
    case GaugeKind::linear: return "linear";
    case GaugeKind::square: return "square";
    case GaugeKind::power: return "power:" + format_double(p_);
    case GaugeKind::flat: return "flat";
  }
  return "?";
}

double ConvexGauge::max_floor() const {
  switch (kind_) {
    case GaugeKind::square: return 2.0;
    case GaugeKind::power: return p_ >= 2.0 ? p_ * (p_ - 1.0) : 0.0;
    default: return 0.0;
  }
}

ConvexGauge ConvexGauge::with_declared_floor(double c) const {
  if (!(c >= 0.0)) throw InvalidInput("curvature floor must be >= 0");
  if (c > max_floor() * (1.0 + 1e-15)) {
    throw Unsupported("gauge " + name() + " has curvature floor " + format_double(max_floor()) +
                      ", cannot declare c=" + format_double(c));
  }
  ConvexGauge g = *this;
  g.c_ = c;
  return g;
}

bool ConvexGauge::strictly_convex() const {
  return kind_ == GaugeKind::square || (kind_ == GaugeKind::power && p_ > 1.0);
}

long double ConvexGauge::evaluate_ld(long double t) const {
  require_domain(t);
  switch (kind_) {
    case GaugeKind::linear: return t;
    case GaugeKind::square: return t * t;
    case GaugeKind::power: return std::pow(t, static_cast<long double>(p_));
    case GaugeKind::flat: {
      if (t == 1.0L) return 1.0L;
      const long double u = t - 1.0L;
      return t + std::exp(-1.0L / (u * u));
    }
  }
  return t;
}

long double ConvexGauge::right_derivative_ld(long double t) const {
  require_domain(t);
  switch (kind_) {
    case GaugeKind::linear: return 1.0L;
    case GaugeKind::square: return 2.0L * t;
    case GaugeKind::power: {
      const long double p = p_;
      return p * std::pow(t, p - 1.0L);
    }
    case GaugeKind::flat: {
      if (t == 1.0L) return 1.0L;
      const long double u = t - 1.0L;
      return 1.0L + 2.0L * std::exp(-1.0L / (u * u)) / (u * u * u);
    }
  }
  return 1.0L;
}

double ConvexGauge::evaluate(double t) const { return static_cast<double>(evaluate_ld(t)); }

double ConvexGauge::right_derivative(double t) const {
  return static_cast<double>(right_derivative_ld(t));
}

double taylor_gap(const ConvexGauge& gauge, double s, double t) {
  const long double ls = s;
  const long double lt = t;
  const long double d = lt - ls;
  const long double c = gauge.curvature_floor();
  return static_cast<double>(gauge.evaluate_ld(lt) - gauge.evaluate_ld(ls) -
                             gauge.right_derivative_ld(ls) * d - 0.5L * c * d * d);
}

ThetaCheck theta_check(std::complex<double> z) {
  const double r = std::abs(z);
  if (r == 0.0) return {0.0, 0.0, 0.0};
  const double x = z.real();
  const double y = z.imag();
  const double theta = y * y / (2.0 * r);
  // |z| - Re z without cancellation when Re z > 0.
  const double excess = x > 0.0 ? y * y / (r + x) : r - x;
  return {theta, excess - theta, std::fma(2.0 * theta, r, -y * y)};
}

TaylorSweep taylor_sweep(const ConvexGauge& gauge, std::size_t samples, std::uint64_t seed,
                         double lo, double hi) {
  if (!(lo >= 1.0 && hi > lo)) throw InvalidInput("sweep range must satisfy 1 <= lo < hi");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  TaylorSweep out;
  out.samples = samples;
  out.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples; ++i) {
    const double s = dist(rng);
    const double t = dist(rng);
    const double gap = taylor_gap(gauge, s, t);
    if (gap < -1e-12) ++out.violations;
    if (gap < out.min_gap) {
      out.min_gap = gap;
      out.worst_s = s;
      out.worst_t = t;
    }
  }
  return out;
}

ThetaSweep theta_sweep(std::size_t samples, std::uint64_t seed, double half_width) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-half_width, half_width);
  ThetaSweep out;
  out.samples = samples;
  const double inf = std::numeric_limits<double>::infinity();
  out.min_gap1_right_half = inf;
  out.min_gap1 = inf;
  out.min_gap2 = inf;
  for (std::size_t i = 0; i < samples; ++i) {
    const std::complex<double> z{dist(rng), dist(rng)};
    const ThetaCheck c = theta_check(z);
    if (z.real() >= 0.0) {
      ++out.right_half_samples;
      out.min_gap1_right_half = std::min(out.min_gap1_right_half, c.gap1);
    }
    out.min_gap1 = std::min(out.min_gap1, c.gap1);
    out.min_gap2 = std::min(out.min_gap2, c.gap2);
  }
  return out;
}

}  // namespace qclab
