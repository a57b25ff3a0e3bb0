#include "qclab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "qclab/error.hpp"
#include "qclab/report.hpp"

namespace qclab {

DistortionSample distortion_of(const WirtingerPair& d) {
  const double a = std::abs(d.d_z);
  const double b = std::abs(d.d_zbar);
  DistortionSample s;
  s.jacobian = d.jacobian();
  if (a > 0.0) s.mu = d.d_zbar / d.d_z;
  if (b < a) {
    s.K = (a + b) / (a - b);
  } else {
    s.K = 1.0;
    s.degenerate = true;
  }
  return s;
}

DistortionSample pointwise_analysis(const MapFamily& map, Complex z) {
  return distortion_of(wirtinger(map, z));
}

namespace {

bool grid_has_vertical_line(const QuadratureGrid& grid, double x) {
  switch (grid.kind()) {
    case CoordinateKind::cartesian:
      if (!(x > grid.first_lo() && x < grid.first_hi())) return true;
      return grid.has_first_edge(x);
    case CoordinateKind::parallelogram: {
      const auto& p = grid.parallelogram();
      if (p.side.real() != 0.0) return false;
      const double s = x / p.base.real();
      if (!(s > 0.0 && s < 1.0)) return true;
      return grid.has_first_edge(s);
    }
    case CoordinateKind::polar:
      return false;
  }
  return false;
}

bool grid_has_circle(const QuadratureGrid& grid, double r) {
  if (grid.kind() != CoordinateKind::polar) return false;
  if (!(r > grid.first_lo() && r < grid.first_hi())) return true;
  return grid.has_first_edge(r);
}

}  // namespace

void require_breaks_honored(const MapFamily& map, const QuadratureGrid& grid) {
  const BreakSet breaks = break_set(map);
  for (double r : breaks.circles) {
    if (!grid_has_circle(grid, r)) {
      throw InvalidInput("grid does not honor break circle |z| = " + format_double(r) + " of " +
                         map.describe());
    }
  }
  for (double x : breaks.vertical_lines) {
    if (!grid_has_vertical_line(grid, x)) {
      throw InvalidInput("grid does not honor break line Re z = " + format_double(x) + " of " +
                         map.describe());
    }
  }
}

MeanDistortion mean_distortion(const MapFamily& map, const ConvexGauge& gauge, DensityKind density,
                               const QuadratureGrid& grid) {
  if (density == DensityKind::inverse_square && grid.kind() != CoordinateKind::polar) {
    throw InvalidInput("inverse_square density needs a polar grid on an annulus");
  }
  require_breaks_honored(map, grid);

  const auto cells = grid.cells();
  std::vector<double> samples(cells.size());
  std::vector<char> degenerate(cells.size(), 0);
  parallel_for(cells.size(), [&](std::size_t i) {
    const Complex z = cells[i].center;
    const DistortionSample s = pointwise_analysis(map, z);
    degenerate[i] = s.degenerate ? 1 : 0;
    const double rho = density == DensityKind::inverse_square ? 1.0 / std::norm(z) : 1.0;
    samples[i] = gauge.evaluate(s.K) * rho;
  });

  MeanDistortion out;
  out.value = integrate(grid, samples);
  out.total_cells = cells.size();
  out.degenerate_cells = static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), 1));
  out.warning = 100 * out.degenerate_cells > out.total_cells;
  return out;
}

Deficit deficit(const MapFamily& candidate, const MapFamily& reference, const ConvexGauge& gauge,
                const QuadratureGrid& grid) {
  const auto* spiral = reference.get_if<SpiralStretch>();
  if (spiral == nullptr || spiral->N != 0) {
    throw InvalidInput("deficit reference must be a spiral stretch with N = 0");
  }
  Deficit d;
  d.candidate = mean_distortion(candidate, gauge, DensityKind::inverse_square, grid).value;
  d.reference = mean_distortion(reference, gauge, DensityKind::inverse_square, grid).value;
  d.value = d.candidate / d.reference - 1.0;
  d.below_zero = d.value < -1e-8;
  return d;
}

double l1_distance(const MapFamily& a, const MapFamily& b, const QuadratureGrid& grid) {
  const auto samples = sample_cells(grid, [&](Complex z) { return std::abs(eval(a, z) - eval(b, z)); });
  return integrate(grid, samples);
}

TransferCheck conformal_transfer_check(const MapFamily& g, const MapFamily& f,
                                       const ConvexGauge& gauge, const QuadratureGrid& annulus_grid,
                                       const QuadratureGrid& rectangle_grid) {
  if (annulus_grid.kind() != CoordinateKind::polar || annulus_grid.first_hi() != 1.0) {
    throw InvalidInput("annulus side needs a polar grid on q <= |w| <= 1");
  }
  if (rectangle_grid.kind() != CoordinateKind::cartesian) {
    throw InvalidInput("rectangle side needs a cartesian grid");
  }
  const double q = annulus_grid.first_lo();
  const double ell = strip_width(q);
  const double width = rectangle_grid.first_hi();
  if (std::abs(width - ell) > 1e-12 * ell) {
    throw InvalidInput("rectangle width " + format_double(width) + " does not match l(q) = " +
                       format_double(ell));
  }

  const MapFamily exp_e{ExpCoordinates{q}};
  const Complex corner = eval(f, Complex{ell, 0.0});
  const double probes[] = {0.13, 0.37, 0.61, 0.89};
  for (double a : probes) {
    for (double b : probes) {
      const Complex z{a * ell, b};
      const Complex expected = eval(g, eval(exp_e, z));
      const Complex got = std::exp(kTwoPi * (eval(f, z) - corner));
      if (std::abs(got - expected) > 1e-9 * std::abs(expected)) {
        throw InvalidInput("rectangle map does not correspond to the annulus map under z -> q exp(2 pi z)");
      }
    }
  }

  TransferCheck out;
  out.annulus = mean_distortion(g, gauge, DensityKind::inverse_square, annulus_grid).value;
  out.rectangle = mean_distortion(f, gauge, DensityKind::uniform, rectangle_grid).value;
  out.scaled_rectangle = 4.0 * kPi * kPi * out.rectangle;
  out.relative_gap = std::abs(out.annulus - out.scaled_rectangle) / std::abs(out.annulus);
  return out;
}

}  // namespace qclab
