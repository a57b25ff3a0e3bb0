#pragma once

#include <complex>
#include <cstdint>
#include <string>

namespace qclab {

enum class GaugeKind { linear, square, power, flat };

/// phi: [1, inf) -> R with phi(1) = 1, plus the curvature floor c used by the
/// quadratic Taylor bound phi(t) >= phi(s) + phi'_+(s)(t-s) + (c/2)(t-s)^2.
class ConvexGauge {
 public:
  static ConvexGauge linear();
  static ConvexGauge square();
  /// t^p, p >= 1.
  static ConvexGauge power(double p);
  /// t + exp(-1/(t-1)^2), with phi(1) = 1.
  static ConvexGauge flat();

  /// "linear", "square", "power:<p>" or "flat".
  static ConvexGauge parse(const std::string& name);

  GaugeKind kind() const { return kind_; }
  double exponent() const { return p_; }
  std::string name() const;

  /// Declared floor: 2 for square, p(p-1) for power with p >= 2, else 0.
  double curvature_floor() const { return c_; }
  /// Same gauge with a different declared floor. Throws Unsupported when c
  /// exceeds what the gauge can honor on [1, inf).
  ConvexGauge with_declared_floor(double c) const;

  /// Square and power with p > 1.
  bool strictly_convex() const;

  /// Throws DomainError for t < 1.
  double evaluate(double t) const;
  double right_derivative(double t) const;

  long double evaluate_ld(long double t) const;
  long double right_derivative_ld(long double t) const;

 private:
  ConvexGauge(GaugeKind kind, double p, double c) : kind_(kind), p_(p), c_(c) {}
  double max_floor() const;

  GaugeKind kind_;
  double p_;
  double c_;
};

/// phi(t) - phi(s) - phi'_+(s)(t - s) - (c/2)(t - s)^2 at the declared c,
/// evaluated in extended precision.
double taylor_gap(const ConvexGauge& gauge, double s, double t);

struct ThetaCheck {
  double theta;  ///< (Im z)^2 / (2|z|), 0 at z = 0
  double gap1;   ///< (|z| - Re z) - theta, >= 0 for every z
  double gap2;   ///< 2 theta |z| - (Im z)^2, zero up to rounding
};

ThetaCheck theta_check(std::complex<double> z);

struct TaylorSweep {
  std::size_t samples = 0;
  std::size_t violations = 0;  ///< gaps below -1e-12
  double min_gap = 0.0;
  double worst_s = 1.0;
  double worst_t = 1.0;
};

/// Uniform random pairs (s, t) in [lo, hi]^2.
TaylorSweep taylor_sweep(const ConvexGauge& gauge, std::size_t samples, std::uint64_t seed,
                         double lo = 1.0, double hi = 50.0);

struct ThetaSweep {
  std::size_t samples = 0;
  std::size_t right_half_samples = 0;
  double min_gap1_right_half = 0.0;  ///< over samples with Re z >= 0
  double min_gap1 = 0.0;             ///< over all samples
  double min_gap2 = 0.0;
};

/// Uniform random z in [-half_width, half_width]^2.
ThetaSweep theta_sweep(std::size_t samples, std::uint64_t seed, double half_width = 10.0);

}  // namespace qclab
