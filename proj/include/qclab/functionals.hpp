#pragma once

#include <cstddef>
#include <string>

#include "qclab/gauge.hpp"
#include "qclab/geometry.hpp"
#include "qclab/map_zoo.hpp"

namespace qclab {

struct DistortionSample {
  double K = 1.0;
  Complex mu{0.0, 0.0};
  double jacobian = 0.0;
  /// |d_zbar| >= |d_z|: K is set to 1 and mu is unreliable.
  bool degenerate = false;
};

DistortionSample distortion_of(const WirtingerPair& d);
DistortionSample pointwise_analysis(const MapFamily& map, Complex z);

enum class DensityKind { uniform, inverse_square };

struct MeanDistortion {
  double value = 0.0;
  std::size_t degenerate_cells = 0;
  std::size_t total_cells = 0;
  /// More than 1% of the cells were degenerate.
  bool warning = false;
};

/// Throws InvalidInput if the grid does not honor the map's break set, or if
/// inverse_square is requested on a non-polar grid.
void require_breaks_honored(const MapFamily& map, const QuadratureGrid& grid);

/// Integral of phi(K(z, map)) * density over the grid.
MeanDistortion mean_distortion(const MapFamily& map, const ConvexGauge& gauge, DensityKind density,
                               const QuadratureGrid& grid);

struct Deficit {
  double value = 0.0;
  /// value < -1e-8: quadrature bias or a gauge without the lower bound.
  bool below_zero = false;
  double candidate = 0.0;
  double reference = 0.0;
};

/// Ratio of inverse-square mean distortions minus one. The reference must be
/// a SpiralStretch with N = 0 and the grid must be polar.
Deficit deficit(const MapFamily& candidate, const MapFamily& reference, const ConvexGauge& gauge,
                const QuadratureGrid& grid);

/// Integral of |a - b| with uniform density.
double l1_distance(const MapFamily& a, const MapFamily& b, const QuadratureGrid& grid);

struct TransferCheck {
  double annulus = 0.0;           ///< inverse-square functional of g on A_1
  double rectangle = 0.0;         ///< uniform functional of f on Q_1
  double scaled_rectangle = 0.0;  ///< 4 pi^2 * rectangle
  double relative_gap = 0.0;
};

/// Compares the annulus functional of g with 4 pi^2 times the rectangle
/// functional of f. f must equal G o g o E (see rectangle_transfer); this is
/// checked pointwise through exp(2 pi (f(z) - f(l))) = g(q exp(2 pi z)), and
/// the rectangle grid width must be l = log(1/q)/(2 pi) for the annulus grid's q.
TransferCheck conformal_transfer_check(const MapFamily& g, const MapFamily& f,
                                       const ConvexGauge& gauge, const QuadratureGrid& annulus_grid,
                                       const QuadratureGrid& rectangle_grid);

}  // namespace qclab
