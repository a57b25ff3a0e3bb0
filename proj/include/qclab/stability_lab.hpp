#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qclab/gauge.hpp"
#include "qclab/geometry.hpp"
#include "qclab/map_zoo.hpp"

namespace qclab {

/// min(0.1, (k-1)^2 / 2).
double operational_eps0(double k);

struct LadderConfig {
  double q = 0.5;
  double k = 2.0;
  double theta = 0.0;
  std::string gauge = "square";
  std::vector<double> eps;
  std::size_t n_radial = 512;
  std::size_t n_angular = 512;

  /// Throws InvalidInput unless eps is strictly increasing inside (0, (k-1)^2).
  void validate() const;
};

/// g^(eps) for theta = 0; otherwise the spiral twist u -> u exp(i theta
/// log|u| / log q^k) applied after g^(eps), so that theta = 0 reduces to it.
MapFamily ladder_candidate(double q, double k, double theta, double eps);

struct LadderRow {
  double eps = 0.0;
  double deficit = 0.0;
  double l1 = 0.0;
  double dbar_mass = 0.0;
  /// |deficit(n) - deficit(n/2)| / 3, the Richardson error estimate.
  double deficit_error = 0.0;
  bool included = false;
};

struct FitReport {
  std::vector<LadderRow> rows;
  bool fitted = false;
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
  std::size_t used_rows = 0;
  /// Range of l1 / sqrt(deficit) over the included rows.
  double band_lo = 0.0;
  double band_hi = 0.0;
  /// Every deficit was within noise of zero (or negative).
  bool zero_deficit = false;
  std::string diagnostic;
};

/// Deficit, l1 distance and dbar mass per eps; least squares of log l1 on
/// log deficit over the rows whose deficit exceeds ten times its error
/// estimate. Fewer than two such rows: no fit, with a diagnostic.
FitReport run_ladder(const LadderConfig& config);

/// Ordinary least squares y = slope * x + intercept.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct AlphaStar {
  double alpha = 0.0;  ///< in (-pi, pi]
  double R = 0.0;
  bool degenerate = false;
};

/// Polar form R e^{-i alpha} of the integral of (mu*/|mu*|) f_z + f_zbar
/// over the grid. Throws Unsupported when mu* = 0.
AlphaStar alpha_star(const MapFamily& f, const LinearStretch& fstar, const QuadratureGrid& grid);

struct AuditReport {
  std::string lemma;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool passed = false;
  std::vector<std::pair<std::string, double>> constants;
  std::string notes;
};

/// Relative excess of the uniform functional of f over that of f* on Q_1.
double rectangle_excess(const MapFamily& f, const LinearStretch& fstar, const ConvexGauge& gauge,
                        const QuadratureGrid& grid);

/// lhs = int (K - K*)^2, rhs = (2/c) * excess * int phi(K*). Unsupported when c = 0.
AuditReport audit_K_L2(const MapFamily& f, const LinearStretch& fstar, const ConvexGauge& gauge,
                       const QuadratureGrid& grid);

/// lhs = int K(f), rhs = (1 + C * excess) * int K(f*), C = phi(K*) / (phi'_+(K*) K*).
AuditReport audit_K_mean(const MapFamily& f, const LinearStretch& fstar, const ConvexGauge& gauge,
                         const QuadratureGrid& grid);

struct Alignment {
  double alpha = 0.0;
  double real_part_gap = 0.0;
  double imag_part_mass = 0.0;
  double absdiff_mass = 0.0;
  /// Square-gauge excess of f over f* and its square root.
  double eps_reference = 0.0;
  double sqrt_eps_reference = 0.0;
};

Alignment audit_alignment(const MapFamily& f, const LinearStretch& fstar, const QuadratureGrid& grid);

/// lhs = inverse-square functional of g_N, rhs = that of g*; passes iff
/// lhs - rhs > 1e-6. N < 1 is rejected.
AuditReport audit_gN_gap(double q, double k, double theta, int N, const ConvexGauge& gauge,
                         const QuadratureGrid& grid);

/// lhs = worst Taylor-gap violation (-min gap), rhs = 1e-12.
AuditReport audit_taylor(const ConvexGauge& gauge, std::size_t samples, std::uint64_t seed);

/// lhs = worst violation of gap1 (Re z >= 0) and gap2, rhs = 1e-12.
AuditReport audit_theta(std::size_t samples, std::uint64_t seed);

struct FlatLadderRow {
  double eps = 0.0;
  double flat_deficit = 0.0;
  double square_deficit = 0.0;
  double l1 = 0.0;
  double eta = 0.0;        ///< eps^(1/alpha)
  double eta_alpha = 0.0;  ///< eta^alpha
  bool l1_exceeds = false;
  bool deficit_below_eta = false;
  /// |phi(k+s) + phi(k-s) - 2 phi(k)| / 2 with s = sqrt(eps).
  double nonlinear_excess = 0.0;
  /// nonlinear_excess <= flat_regime_threshold.
  bool flat_regime = false;
};

struct FlatLadderReport {
  double alpha = 0.0;
  double flat_regime_threshold = 1e-12;
  std::vector<FlatLadderRow> rows;
};

FlatLadderReport run_flat_gauge_ladder(double q, double k, double alpha,
                                       const std::vector<double>& eps, std::size_t n_radial,
                                       std::size_t n_angular);

}  // namespace qclab
