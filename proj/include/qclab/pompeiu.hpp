#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "qclab/geometry.hpp"
#include "qclab/map_zoo.hpp"

namespace qclab {

/// Closed polygonal or circular curve sampled for trapezoid quadrature:
/// weights[j] is the d(xi) carried by nodes[j].
struct BoundaryComponent {
  std::vector<Complex> nodes;
  std::vector<Complex> weights;
  std::vector<Complex> values;

  /// Largest |d(xi)|.
  double spacing() const;
};

struct BoundaryTrace {
  std::vector<BoundaryComponent> components;
};

using ComplexFn = std::function<Complex(Complex)>;

/// Uniform-in-angle nodes on |xi| = radius.
BoundaryComponent circle_component(double radius, std::size_t nodes, bool counterclockwise,
                                   const ComplexFn& values);

/// Closed polygon through `vertices` (in order), nodes_per_side uniform
/// nodes on each side, trapezoid weights.
BoundaryComponent polygon_component(const std::vector<Complex>& vertices,
                                    std::size_t nodes_per_side, const ComplexFn& values);

/// Outer circle counter-clockwise, inner circle clockwise.
BoundaryTrace annulus_trace(double inner_radius, double outer_radius, std::size_t nodes_per_circle,
                            const ComplexFn& values);

/// (1/2 pi i) sum values * weights / (xi - w). Throws AccuracyError when w is
/// within two node spacings of a component.
Complex cauchy_boundary(const BoundaryTrace& trace, Complex w);

struct DbarField {
  std::shared_ptr<const QuadratureGrid> grid;
  std::vector<Complex> values;
};

/// d/dzbar of the map at every cell center.
DbarField dbar_field(const MapFamily& map, std::shared_ptr<const QuadratureGrid> grid);

/// (1/pi) sum value * weight / (w - center), skipping the cells whose
/// centers lie within 1.5 cells of w in both grid coordinates (the 3 x 3 block
/// around a cell center, 2 x 2 around a cell corner; angles wrap). The
/// skipped patch is treated as a disk centered at w, whose Cauchy integral
/// vanishes. Throws DomainError when w is outside the grid.
Complex pompeiu_area(const DbarField& field, Complex w);

/// Sum of weight / |center - xi| over all cells.
double kernel_mass(const QuadratureGrid& grid, Complex xi);

/// Integral of |dbar| over the field's grid.
double dbar_mass(const DbarField& field);

struct Reconstruction {
  Complex value;
  double residual = 0.0;
  /// w lies within two radial cells of a break circle.
  bool reduced_accuracy = false;
};

/// Boundary Cauchy integral plus Pompeiu area integral on an annulus with a
/// polar grid. Boundary values and the dbar field are computed once.
class Reconstructor {
 public:
  /// For a closed-form map; break circles come from the map's break set.
  Reconstructor(const MapFamily& map, std::shared_ptr<const QuadratureGrid> grid,
                std::size_t nodes_per_circle);
  /// For arbitrary smooth data given as value and d/dzbar.
  Reconstructor(ComplexFn value, ComplexFn dbar, std::shared_ptr<const QuadratureGrid> grid,
                std::size_t nodes_per_circle, std::vector<double> break_circles = {});

  Reconstruction operator()(Complex w) const;

  const BoundaryTrace& trace() const { return trace_; }
  const DbarField& field() const { return field_; }

 private:
  ComplexFn value_;
  BoundaryTrace trace_;
  DbarField field_;
  std::vector<double> break_edges_;
};

/// The parallelogram (or rectangle, when n = 0) f*(Q_1) for Q_1 = [0, l] x [0, 1].
ParallelogramDomain stretched_rectangle(const LinearStretch& fstar, double ell);

/// Integral over f*(Q_1) of |Psi_wbar| for Psi = f o (f*)^-1. The grid must be
/// on f*(Q_1) and honor the pushed-forward breaks of f.
double psi_dbar_mass(const MapFamily& f, const LinearStretch& fstar, const QuadratureGrid& grid);

/// Integral over A_2 of |Phi_wbar| for Phi = g o (g*)^-1. Polar grid on
/// q^k <= |w| <= 1 honoring the pushed-forward break circles.
double phi_dbar_mass(const MapFamily& g, const SpiralStretch& gstar, const QuadratureGrid& grid);

}  // namespace qclab
