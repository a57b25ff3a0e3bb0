#include "qclab/pompeiu.hpp"

#include <algorithm>
#include <cmath>

#include "qclab/error.hpp"
#include "qclab/functionals.hpp"

namespace qclab {

namespace {

constexpr Complex kI{0.0, 1.0};

// Complex compensated sum, real and imaginary parts tracked separately.
struct ComplexSum {
  CompensatedSum re;
  CompensatedSum im;
  void add(Complex z) {
    re.add(z.real());
    im.add(z.imag());
  }
  Complex value() const { return {re.value(), im.value()}; }
};

// Row-wise partial sums in parallel, then the rows in order: the result does
// not depend on the thread count.
template <class Fn>
Complex ordered_cell_sum(const QuadratureGrid& grid, Fn&& term) {
  const std::size_t rows = grid.n_first();
  const std::size_t cols = grid.n_second();
  std::vector<Complex> partial(rows);
  parallel_for(rows, [&](std::size_t i) {
    ComplexSum s;
    for (std::size_t j = 0; j < cols; ++j) s.add(term(i, j, i * cols + j));
    partial[i] = s.value();
  });
  ComplexSum total;
  for (const Complex& p : partial) total.add(p);
  return total.value();
}

}  // namespace

double BoundaryComponent::spacing() const {
  double h = 0.0;
  for (const Complex& dw : weights) h = std::max(h, std::abs(dw));
  return h;
}

BoundaryComponent circle_component(double radius, std::size_t nodes, bool counterclockwise,
                                   const ComplexFn& values) {
  if (!(radius > 0.0)) throw InvalidInput("circle radius must be > 0");
  if (nodes < 3) throw InvalidInput("a circle needs at least 3 nodes");
  BoundaryComponent c;
  const double dtheta = kTwoPi / static_cast<double>(nodes);
  const double sign = counterclockwise ? 1.0 : -1.0;
  for (std::size_t j = 0; j < nodes; ++j) {
    const Complex xi = std::polar(radius, dtheta * static_cast<double>(j));
    c.nodes.push_back(xi);
    c.weights.push_back(sign * kI * xi * dtheta);
    c.values.push_back(values(xi));
  }
  return c;
}

BoundaryComponent polygon_component(const std::vector<Complex>& vertices,
                                    std::size_t nodes_per_side, const ComplexFn& values) {
  if (vertices.size() < 3) throw InvalidInput("a polygon needs at least 3 vertices");
  if (nodes_per_side < 1) throw InvalidInput("nodes_per_side must be >= 1");
  BoundaryComponent c;
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    const Complex a = vertices[v];
    const Complex b = vertices[(v + 1) % vertices.size()];
    for (std::size_t j = 0; j < nodes_per_side; ++j) {
      c.nodes.push_back(a + (b - a) * (static_cast<double>(j) / static_cast<double>(nodes_per_side)));
    }
  }
  const std::size_t m = c.nodes.size();
  for (std::size_t j = 0; j < m; ++j) {
    c.weights.push_back(0.5 * (c.nodes[(j + 1) % m] - c.nodes[(j + m - 1) % m]));
    c.values.push_back(values(c.nodes[j]));
  }
  return c;
}

BoundaryTrace annulus_trace(double inner_radius, double outer_radius, std::size_t nodes_per_circle,
                            const ComplexFn& values) {
  if (!(inner_radius > 0.0 && inner_radius < outer_radius)) {
    throw InvalidInput("annulus radii must satisfy 0 < inner < outer");
  }
  BoundaryTrace t;
  t.components.push_back(circle_component(outer_radius, nodes_per_circle, true, values));
  t.components.push_back(circle_component(inner_radius, nodes_per_circle, false, values));
  return t;
}

Complex cauchy_boundary(const BoundaryTrace& trace, Complex w) {
  ComplexSum sum;
  for (const auto& c : trace.components) {
    const double guard = 2.0 * c.spacing();
    for (const Complex& xi : c.nodes) {
      if (std::abs(xi - w) <= guard) {
        throw AccuracyError("point is within two node spacings of the boundary");
      }
    }
    for (std::size_t j = 0; j < c.nodes.size(); ++j) {
      sum.add(c.values[j] * c.weights[j] / (c.nodes[j] - w));
    }
  }
  return sum.value() / (kTwoPi * kI);
}

DbarField dbar_field(const MapFamily& map, std::shared_ptr<const QuadratureGrid> grid) {
  DbarField f;
  const auto cells = grid->cells();
  f.values.resize(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) { f.values[i] = wirtinger(map, cells[i].center).d_zbar; });
  f.grid = std::move(grid);
  return f;
}

Complex pompeiu_area(const DbarField& field, Complex w) {
  const QuadratureGrid& grid = *field.grid;
  if (field.values.size() != grid.size()) throw InvalidInput("field does not match its grid");
  const auto where = grid.locate(w);
  if (!where) throw DomainError("point lies outside the grid domain");
  const auto [fi, fj] = *where;
  const bool wraps = grid.kind() == CoordinateKind::polar;
  const double n_second = static_cast<double>(grid.n_second());
  const auto cells = grid.cells();

  const Complex sum = ordered_cell_sum(grid, [&](std::size_t i, std::size_t j, std::size_t idx) {
    const double di = std::abs(static_cast<double>(i) + 0.5 - fi);
    double dj = std::abs(static_cast<double>(j) + 0.5 - fj);
    if (wraps) dj = std::min(dj, n_second - dj);
    if (di < 1.5 && dj < 1.5) return Complex{};
    return field.values[idx] * cells[idx].weight / (w - cells[idx].center);
  });
  return sum / kPi;
}

double kernel_mass(const QuadratureGrid& grid, Complex xi) {
  const auto samples = sample_cells(grid, [&](Complex c) { return 1.0 / std::abs(c - xi); });
  return integrate(grid, samples);
}

double dbar_mass(const DbarField& field) {
  std::vector<double> samples(field.values.size());
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = std::abs(field.values[i]);
  return integrate(*field.grid, samples);
}

Reconstructor::Reconstructor(const MapFamily& map, std::shared_ptr<const QuadratureGrid> grid,
                             std::size_t nodes_per_circle)
    : Reconstructor([map](Complex w) { return eval(map, w); },
                    [map](Complex w) { return wirtinger(map, w).d_zbar; }, std::move(grid),
                    nodes_per_circle, break_set(map).circles) {
  require_breaks_honored(map, *field_.grid);
}

Reconstructor::Reconstructor(ComplexFn value, ComplexFn dbar,
                             std::shared_ptr<const QuadratureGrid> grid,
                             std::size_t nodes_per_circle, std::vector<double> break_circles)
    : value_(std::move(value)) {
  if (grid->kind() != CoordinateKind::polar) throw InvalidInput("reconstruction needs a polar grid");
  trace_ = annulus_trace(grid->first_lo(), grid->first_hi(), nodes_per_circle, value_);
  const auto cells = grid->cells();
  field_.values.resize(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) { field_.values[i] = dbar(cells[i].center); });
  const auto edges = grid->first_edges();
  for (double r : break_circles) {
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (std::abs(edges[e] - r) <= 1e-12 * std::max(1.0, r)) {
        break_edges_.push_back(static_cast<double>(e));
      }
    }
  }
  field_.grid = std::move(grid);
}

Reconstruction Reconstructor::operator()(Complex w) const {
  Reconstruction r;
  r.value = cauchy_boundary(trace_, w) + pompeiu_area(field_, w);
  r.residual = std::abs(r.value - value_(w));
  if (const auto where = field_.grid->locate(w)) {
    for (double e : break_edges_) {
      if (std::abs(where->first - e) < 2.0) r.reduced_accuracy = true;
    }
  }
  return r;
}

ParallelogramDomain stretched_rectangle(const LinearStretch& fstar, double ell) {
  if (!(ell > 0.0)) throw InvalidInput("rectangle width must be > 0");
  return ParallelogramDomain::make(Complex{fstar.k * ell, fstar.n * ell}, Complex{0.0, 1.0});
}

double psi_dbar_mass(const MapFamily& f, const LinearStretch& fstar, const QuadratureGrid& grid) {
  const MapFamily psi = compose(f, MapFamily{InverseLinearStretch{fstar.k, fstar.n}});
  require_breaks_honored(psi, grid);
  const auto samples = sample_cells(grid, [&](Complex w) { return std::abs(wirtinger(psi, w).d_zbar); });
  return integrate(grid, samples);
}

double phi_dbar_mass(const MapFamily& g, const SpiralStretch& gstar, const QuadratureGrid& grid) {
  if (gstar.N != 0) throw InvalidInput("reference spiral stretch must have N = 0");
  const MapFamily phi = compose(g, MapFamily{InverseSpiralStretch{gstar.q, gstar.k, gstar.theta}});
  require_breaks_honored(phi, grid);
  const auto samples = sample_cells(grid, [&](Complex w) { return std::abs(wirtinger(phi, w).d_zbar); });
  return integrate(grid, samples);
}

}  // namespace qclab
