#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qclab/parallel.hpp"

namespace qclab {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

/// { w : inner_radius <= |w| <= outer_radius }, outer radius fixed at 1.
struct AnnulusDomain {
  double inner_radius = 0.5;
  double outer_radius = 1.0;

  static AnnulusDomain make(double inner_radius);
  double area() const;
  bool contains(Complex w) const;
};

/// [0, width] x [0, height] with the lower-left corner at the origin.
struct RectangleDomain {
  double width = 1.0;
  double height = 1.0;

  static RectangleDomain make(double width);
  double area() const { return width * height; }
  bool contains(Complex z) const;
};

/// { s*base + t*side : s, t in [0, 1] }. The image of a rectangle under a
/// linear stretch is of this form with base = k*l + i*n*l and side = i.
struct ParallelogramDomain {
  Complex base{1.0, 0.0};
  Complex side{0.0, 1.0};

  static ParallelogramDomain make(Complex base, Complex side = Complex{0.0, 1.0});
  double area() const;
  /// Affine coordinates (s, t) of a point; contains() iff both in [0, 1].
  std::pair<double, double> coordinates(Complex w) const;
  bool contains(Complex w) const;
};

enum class CoordinateKind { polar, cartesian, parallelogram };

enum class RadialSpacing { uniform, geometric };

struct Cell {
  Complex center;
  double weight;
};

/// Tensor-product midpoint rule. Cells are stored first-index-major:
/// index = i * n_second() + j, where i runs over radial (resp. x, resp. the
/// base parameter s) intervals and j over angular (resp. y, resp. t)
/// intervals. That order is the documented reduction order of integrate().
class QuadratureGrid {
 public:
  CoordinateKind kind() const { return kind_; }
  std::span<const Cell> cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  std::size_t n_first() const { return first_edges_.size() - 1; }
  std::size_t n_second() const { return second_edges_.size() - 1; }
  std::span<const double> first_edges() const { return first_edges_; }
  std::span<const double> second_edges() const { return second_edges_; }
  std::span<const double> mandatory_breaks() const { return breaks_; }

  /// Polar grids: annulus radii. Cartesian: [0, width] x [0, height].
  double first_lo() const { return first_edges_.front(); }
  double first_hi() const { return first_edges_.back(); }

  /// Parallelogram grids carry their domain; undefined for other kinds.
  const ParallelogramDomain& parallelogram() const { return parallelogram_; }

  /// Total weight, summed with compensation.
  double total_weight() const;

  /// True if `value` coincides with a first-coordinate edge (radius, abscissa
  /// or base parameter) to within `rel_tol`.
  bool has_first_edge(double value, double rel_tol = 1e-12) const;

  /// Fractional cell coordinates of a point: (i + a, j + b) where (i, j) is
  /// the containing cell and a, b in [0, 1) its relative position. Angular
  /// coordinates wrap. Empty if the point is outside the grid's domain.
  std::optional<std::pair<double, double>> locate(Complex point) const;

  /// Local extent of first-coordinate interval i.
  double first_width(std::size_t i) const { return first_edges_[i + 1] - first_edges_[i]; }

 private:
  friend QuadratureGrid build_polar_grid(const AnnulusDomain&, std::size_t, std::size_t,
                                         std::span<const double>, RadialSpacing);
  friend QuadratureGrid build_cartesian_grid(const RectangleDomain&, std::size_t, std::size_t,
                                             std::span<const double>);
  friend QuadratureGrid build_parallelogram_grid(const ParallelogramDomain&, std::size_t,
                                                 std::size_t, std::span<const double>);

  CoordinateKind kind_ = CoordinateKind::cartesian;
  std::vector<double> first_edges_;
  std::vector<double> second_edges_;
  std::vector<double> breaks_;
  std::vector<Cell> cells_;
  ParallelogramDomain parallelogram_;
};

/// Midpoint cells in (r, angle). The radial range is split at every mandatory
/// break; n_radial cells are shared among the pieces in proportion to their
/// length (in r for uniform spacing, in log r for geometric), at least one
/// each. Cell weight = r_mid * dr * dangle.
QuadratureGrid build_polar_grid(const AnnulusDomain& annulus, std::size_t n_radial,
                                std::size_t n_angular, std::span<const double> mandatory_breaks = {},
                                RadialSpacing spacing = RadialSpacing::uniform);

/// Midpoint cells on the rectangle; each break abscissa is a cell boundary.
QuadratureGrid build_cartesian_grid(const RectangleDomain& rect, std::size_t n_x, std::size_t n_y,
                                    std::span<const double> mandatory_breaks = {});

/// Midpoint cells in the affine parameters (s, t); breaks are values of s.
QuadratureGrid build_parallelogram_grid(const ParallelogramDomain& domain, std::size_t n_s,
                                        std::size_t n_t,
                                        std::span<const double> mandatory_breaks = {});

/// Compensated dot product sum_i weights[i] * samples[i] in index order.
/// Products are split exactly with fma and the running sum uses Neumaier's
/// error-tracking update, so the result is close to correctly rounded and
/// nearly independent of order. Throws PropagationError naming the first
/// non-finite sample; InvalidInput on length mismatch.
double compensated_dot(std::span<const double> weights, std::span<const double> samples);

/// Grid integral of a cell-aligned sample vector.
double integrate(const QuadratureGrid& grid, std::span<const double> samples);

/// Neumaier running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Evaluates fn at every cell center (in parallel) and returns the samples in
/// cell order.
template <class Fn>
std::vector<double> sample_cells(const QuadratureGrid& grid, Fn&& fn) {
  std::vector<double> out(grid.size());
  const auto cells = grid.cells();
  parallel_for(cells.size(), [&](std::size_t i) { out[i] = fn(cells[i].center); });
  return out;
}

}  // namespace qclab
