#include "qclab/stability_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qclab/error.hpp"
#include "qclab/functionals.hpp"
#include "qclab/pompeiu.hpp"
#include "qclab/report.hpp"

namespace qclab {

namespace {

Complex integrate_complex(const QuadratureGrid& grid, const std::vector<Complex>& values) {
  std::vector<double> re(values.size());
  std::vector<double> im(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    re[i] = values[i].real();
    im[i] = values[i].imag();
  }
  return {integrate(grid, re), integrate(grid, im)};
}

QuadratureGrid annulus_grid(double inner, const MapFamily& map, std::size_t n_radial,
                            std::size_t n_angular) {
  const BreakSet breaks = break_set(map);
  std::vector<double> radii;
  for (double r : breaks.circles) {
    if (r > inner && r < 1.0) radii.push_back(r);
  }
  return build_polar_grid(AnnulusDomain::make(inner), n_radial, n_angular, radii);
}

Complex unit_mu(const LinearStretch& fstar) {
  const WirtingerPair d = wirtinger(MapFamily{fstar}, Complex{});
  const Complex mu = d.d_zbar / d.d_z;
  if (std::abs(mu) == 0.0) throw Unsupported("mu* = 0: the reference map is conformal");
  return mu;
}

double integral_of_K(const MapFamily& f, const QuadratureGrid& grid) {
  return mean_distortion(f, ConvexGauge::linear(), DensityKind::uniform, grid).value;
}

AuditReport finish(AuditReport r) {
  r.ratio = r.rhs != 0.0 ? r.lhs / r.rhs : (r.lhs == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
  // The absolute 1e-14 only absorbs rounding when both sides are zero.
  r.passed = r.lhs <= r.rhs * (1.0 + 1e-8) + 1e-14;
  return r;
}

}  // namespace

double operational_eps0(double k) { return std::min(0.1, 0.5 * (k - 1.0) * (k - 1.0)); }

void LadderConfig::validate() const {
  if (!(q > 0.0 && q < 1.0)) throw InvalidInput("q must lie in (0, 1)");
  if (!(k > 1.0)) throw InvalidInput("k must be > 1");
  if (!(std::abs(theta) <= kPi + 1e-12)) throw InvalidInput("theta must lie in [-pi, pi]");
  if (eps.empty()) throw InvalidInput("eps list is empty");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) throw InvalidInput("eps must be > 0");
    if (!(eps[i] < (k - 1.0) * (k - 1.0))) throw InvalidInput("eps must be < (k-1)^2");
    if (i > 0 && !(eps[i] > eps[i - 1])) throw InvalidInput("eps list must be strictly increasing");
  }
  if (n_radial < 2 || n_angular < 2) throw InvalidInput("ladder grids need at least 2x2 cells");
  ConvexGauge::parse(gauge);
}

MapFamily ladder_candidate(double q, double k, double theta, double eps) {
  const MapFamily radial{PiecewiseRadialStretch{q, k, eps}};
  if (theta == 0.0) return radial;
  return compose(MapFamily{SpiralStretch{std::pow(q, k), 1.0, theta, 0}}, radial);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("a line fit needs at least 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidInput("a line fit needs distinct abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    fit.max_residual = std::max(fit.max_residual, std::abs(y[i] - fit.slope * x[i] - fit.intercept));
  }
  return fit;
}

FitReport run_ladder(const LadderConfig& config) {
  config.validate();
  const ConvexGauge gauge = ConvexGauge::parse(config.gauge);
  const double q = config.q;
  const double k = config.k;
  const SpiralStretch gstar{q, k, config.theta, 0};
  const MapFamily reference{gstar};
  const std::size_t nr = config.n_radial;
  const std::size_t na = config.n_angular;

  // All ladder candidates share the same break circle sqrt(q) on A_1 and
  // q^(k/2) on A_2.
  const MapFamily probe = ladder_candidate(q, k, config.theta, config.eps.front());
  const QuadratureGrid fine = annulus_grid(q, probe, nr, na);
  const QuadratureGrid coarse = annulus_grid(q, probe, nr / 2, na / 2);
  const MapFamily probe_phi = compose(probe, MapFamily{InverseSpiralStretch{q, k, config.theta}});
  const QuadratureGrid image = annulus_grid(std::pow(q, k), probe_phi, nr, na);

  const double ref_fine = mean_distortion(reference, gauge, DensityKind::inverse_square, fine).value;
  const double ref_coarse = mean_distortion(reference, gauge, DensityKind::inverse_square, coarse).value;

  FitReport report;
  std::vector<double> log_d;
  std::vector<double> log_l1;
  report.band_lo = std::numeric_limits<double>::infinity();
  report.band_hi = 0.0;
  for (double eps : config.eps) {
    const MapFamily g = ladder_candidate(q, k, config.theta, eps);
    LadderRow row;
    row.eps = eps;
    row.deficit = mean_distortion(g, gauge, DensityKind::inverse_square, fine).value / ref_fine - 1.0;
    const double coarse_deficit =
        mean_distortion(g, gauge, DensityKind::inverse_square, coarse).value / ref_coarse - 1.0;
    row.deficit_error = std::abs(row.deficit - coarse_deficit) / 3.0 + 1e-12;
    row.l1 = l1_distance(g, reference, fine);
    row.dbar_mass = phi_dbar_mass(g, gstar, image);
    row.included = row.deficit > 0.0 && row.deficit > 10.0 * row.deficit_error;
    if (row.included) {
      log_d.push_back(std::log(row.deficit));
      log_l1.push_back(std::log(row.l1));
      const double ratio = row.l1 / std::sqrt(row.deficit);
      report.band_lo = std::min(report.band_lo, ratio);
      report.band_hi = std::max(report.band_hi, ratio);
    }
    report.rows.push_back(row);
  }
  report.used_rows = log_d.size();
  report.zero_deficit = log_d.empty();
  if (log_d.size() < 2) {
    report.band_lo = report.band_hi = 0.0;
    report.diagnostic = report.zero_deficit
                            ? "gauge yields zero deficit; use a strictly convex gauge"
                            : "fewer than two rows with a deficit above quadrature noise";
    return report;
  }
  const LineFit fit = fit_line(log_d, log_l1);
  report.fitted = true;
  report.slope = fit.slope;
  report.intercept = fit.intercept;
  report.max_residual = fit.max_residual;
  return report;
}

AlphaStar alpha_star(const MapFamily& f, const LinearStretch& fstar, const QuadratureGrid& grid) {
  const Complex mu = unit_mu(fstar);
  const Complex phase = mu / std::abs(mu);
  require_breaks_honored(f, grid);
  const auto cells = grid.cells();
  std::vector<Complex> values(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    const WirtingerPair d = wirtinger(f, cells[i].center);
    values[i] = phase * d.d_z + d.d_zbar;
  });
  const Complex total = integrate_complex(grid, values);
  AlphaStar out;
  out.R = std::abs(total);
  if (out.R == 0.0) {
    out.degenerate = true;
    return out;
  }
  out.alpha = -std::arg(total) + 0.0;
  if (out.alpha <= -kPi) out.alpha += kTwoPi;
  return out;
}

double rectangle_excess(const MapFamily& f, const LinearStretch& fstar, const ConvexGauge& gauge,
                        const QuadratureGrid& grid) {
  const double candidate = mean_distortion(f, gauge, DensityKind::uniform, grid).value;
  const double reference = mean_distortion(MapFamily{fstar}, gauge, DensityKind::uniform, grid).value;
  return candidate / reference - 1.0;
}

AuditReport audit_K_L2(const MapFamily& f, const LinearStretch& fstar, const ConvexGauge& gauge,
                       const QuadratureGrid& grid) {
  const double c = gauge.curvature_floor();
  if (!(c > 0.0)) {
    throw Unsupported("gauge " + gauge.name() + " has curvature floor 0; the K L2 bound needs c > 0");
  }
  require_breaks_honored(f, grid);
  const double k_star = pointwise_analysis(MapFamily{fstar}, Complex{}).K;
  const auto samples = sample_cells(grid, [&](Complex z) {
    const double d = pointwise_analysis(f, z).K - k_star;
    return d * d;
  });
  const double excess = rectangle_excess(f, fstar, gauge, grid);
  const double phi_star = mean_distortion(MapFamily{fstar}, gauge, DensityKind::uniform, grid).value;

  AuditReport r;
  r.lemma = "k-l2";
  r.lhs = integrate(grid, samples);
  r.rhs = (2.0 / c) * excess * phi_star;
  r.constants = {{"c", c}, {"excess", excess}, {"int_phi_K_star", phi_star}, {"K_star", k_star}};
  return finish(r);
}

AuditReport audit_K_mean(const MapFamily& f, const LinearStretch& fstar, const ConvexGauge& gauge,
                         const QuadratureGrid& grid) {
  const double k_star = pointwise_analysis(MapFamily{fstar}, Complex{}).K;
  const double C = gauge.evaluate(k_star) / (gauge.right_derivative(k_star) * k_star);
  const double excess = rectangle_excess(f, fstar, gauge, grid);

  AuditReport r;
  r.lemma = "k-mean";
  r.lhs = integral_of_K(f, grid);
  r.rhs = (1.0 + C * excess) * integral_of_K(MapFamily{fstar}, grid);
  r.constants = {{"C", C}, {"excess", excess}, {"K_star", k_star}};
  if (!gauge.strictly_convex()) r.notes = "gauge is not strictly convex";
  return finish(r);
}

Alignment audit_alignment(const MapFamily& f, const LinearStretch& fstar, const QuadratureGrid& grid) {
  const AlphaStar a = alpha_star(f, fstar, grid);
  const Complex mu = unit_mu(fstar);
  const Complex rot = std::polar(1.0, a.alpha);
  const auto cells = grid.cells();
  std::vector<double> real_gap(cells.size());
  std::vector<double> imag_mass(cells.size());
  std::vector<double> absdiff(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    const WirtingerPair d = wirtinger(f, cells[i].center);
    const Complex u = rot * mu * d.d_z;
    const Complex v = rot * d.d_zbar;
    real_gap[i] = (std::abs(u) - u.real()) + (std::abs(v) - v.real());
    imag_mass[i] = std::abs(u.imag()) + std::abs(v.imag());
    absdiff[i] = std::abs(std::abs(d.d_zbar) - std::abs(mu * d.d_z));
  });
  Alignment out;
  out.alpha = a.alpha;
  out.real_part_gap = integrate(grid, real_gap);
  out.imag_part_mass = integrate(grid, imag_mass);
  out.absdiff_mass = integrate(grid, absdiff);
  out.eps_reference = rectangle_excess(f, fstar, ConvexGauge::square(), grid);
  out.sqrt_eps_reference = std::sqrt(std::max(0.0, out.eps_reference));
  return out;
}

AuditReport audit_gN_gap(double q, double k, double theta, int N, const ConvexGauge& gauge,
                         const QuadratureGrid& grid) {
  if (N < 1) throw InvalidInput("homotopy gap needs N >= 1");
  const MapFamily gn{SpiralStretch{q, k, theta, N}};
  const MapFamily g0{SpiralStretch{q, k, theta, 0}};
  if (grid.kind() != CoordinateKind::polar || std::abs(grid.first_lo() - q) > 1e-15) {
    throw InvalidInput("homotopy gap needs a polar grid on q <= |w| <= 1");
  }
  AuditReport r;
  r.lemma = "gn-gap";
  r.lhs = mean_distortion(gn, gauge, DensityKind::inverse_square, grid).value;
  r.rhs = mean_distortion(g0, gauge, DensityKind::inverse_square, grid).value;
  r.ratio = r.lhs / r.rhs;
  const double gap = r.lhs - r.rhs;
  r.passed = gap > 1e-6;
  r.constants = {{"gap", gap}, {"N", static_cast<double>(N)}};
  r.notes = "passes when lhs - rhs > 1e-6";
  return r;
}

AuditReport audit_taylor(const ConvexGauge& gauge, std::size_t samples, std::uint64_t seed) {
  const TaylorSweep s = taylor_sweep(gauge, samples, seed);
  AuditReport r;
  r.lemma = "taylor";
  r.lhs = -s.min_gap;
  r.rhs = 1e-12;
  r.constants = {{"c", gauge.curvature_floor()},
                 {"min_gap", s.min_gap},
                 {"worst_s", s.worst_s},
                 {"worst_t", s.worst_t},
                 {"violations", static_cast<double>(s.violations)}};
  r = finish(r);
  r.ratio = r.lhs / r.rhs;
  return r;
}

AuditReport audit_theta(std::size_t samples, std::uint64_t seed) {
  const ThetaSweep s = theta_sweep(samples, seed);
  AuditReport r;
  r.lemma = "theta";
  r.lhs = std::max(-s.min_gap1_right_half, -s.min_gap2);
  r.rhs = 1e-12;
  r.constants = {{"min_gap1_right_half", s.min_gap1_right_half},
                 {"min_gap1_all", s.min_gap1},
                 {"min_gap2", s.min_gap2},
                 {"right_half_samples", static_cast<double>(s.right_half_samples)}};
  r = finish(r);
  r.ratio = r.lhs / r.rhs;
  return r;
}

FlatLadderReport run_flat_gauge_ladder(double q, double k, double alpha,
                                       const std::vector<double>& eps, std::size_t n_radial,
                                       std::size_t n_angular) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw InvalidInput("alpha must lie in (0, 1/2)");
  LadderConfig config;
  config.q = q;
  config.k = k;
  config.eps = eps;
  config.n_radial = n_radial;
  config.n_angular = n_angular;
  config.validate();

  const ConvexGauge flat = ConvexGauge::flat();
  const ConvexGauge square = ConvexGauge::square();
  const MapFamily reference{SpiralStretch{q, k, 0.0, 0}};
  const QuadratureGrid grid = annulus_grid(q, ladder_candidate(q, k, 0.0, eps.front()), n_radial, n_angular);

  FlatLadderReport report;
  report.alpha = alpha;
  for (double e : eps) {
    const MapFamily g = ladder_candidate(q, k, 0.0, e);
    FlatLadderRow row;
    row.eps = e;
    row.flat_deficit = deficit(g, reference, flat, grid).value;
    row.square_deficit = deficit(g, reference, square, grid).value;
    row.l1 = l1_distance(g, reference, grid);
    row.eta = std::pow(e, 1.0 / alpha);
    row.eta_alpha = std::pow(row.eta, alpha);
    row.l1_exceeds = row.l1 > row.eta_alpha;
    row.deficit_below_eta = row.flat_deficit <= row.eta;
    const double s = std::sqrt(e);
    row.nonlinear_excess =
        0.5 * std::abs(flat.evaluate(k + s) + flat.evaluate(k - s) - 2.0 * flat.evaluate(k));
    row.flat_regime = row.nonlinear_excess <= report.flat_regime_threshold;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace qclab
