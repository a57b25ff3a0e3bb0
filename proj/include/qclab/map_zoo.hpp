#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "qclab/geometry.hpp"

namespace qclab {

class MapFamily;

// Parameter blocks, one per closed-form family. Ranges are checked when a
// MapFamily is constructed from them.

/// f*(z) = kx + inx + iy.
struct LinearStretch {
  double k = 2.0;
  double n = 0.0;
};

/// (f*)^-1(x' + iy') = x'/k + i(y' - n x'/k).
struct InverseLinearStretch {
  double k = 2.0;
  double n = 0.0;
};

/// g_N(w) = w |w|^(k-1) exp(i (theta + 2 pi N) log|w| / log q); N = 0 is g*.
struct SpiralStretch {
  double q = 0.5;
  double k = 2.0;
  double theta = 0.0;
  int N = 0;
};

/// (g*)^-1: r = |w|^(1/k), angle untwisted by theta log r / log q.
struct InverseSpiralStretch {
  double q = 0.5;
  double k = 2.0;
  double theta = 0.0;
};

/// f_eps(x + iy) = g_eps(x) + iy on [0, ell] x [0, 1], slope k + sqrt(eps) on
/// the left half and k - sqrt(eps) on the right half. Break: x = ell/2.
struct PiecewiseLinearStretch {
  double k = 2.0;
  double eps = 0.01;
  double ell = 1.0;
};

/// g^(eps)(w) = q^sqrt(eps) w |w|^(k-1-sqrt(eps)) for |w| <= sqrt(q),
///              w |w|^(k-1+sqrt(eps))            for |w| >= sqrt(q).
struct PiecewiseRadialStretch {
  double q = 0.5;
  double k = 2.0;
  double eps = 0.01;
};

/// z -> q exp(2 pi z): rectangle [0, l] x [0, 1] onto A_1, l = log(1/q)/(2 pi).
struct ExpCoordinates {
  double q = 0.5;
};

/// G(w) = log(w)/(2 pi) + k l + i n l. The argument is taken in
/// [n log|w| / k, n log|w| / k + 2 pi): the cut follows g*(gamma) for the
/// spiral with theta = -2 pi l n, and is the positive real axis when n = 0.
struct LogCoordinatesG {
  double q = 0.5;
  double k = 2.0;
  double ell = 0.0;
  double n = 0.0;
};

/// F(z) = q^k exp(2 pi z).
struct ExpCoordinatesF {
  double q = 0.5;
  double k = 2.0;
};

/// z -> exp(i angle) z.
struct Rotation {
  double angle = 0.0;
};

/// outer o inner.
struct Composition {
  std::shared_ptr<const MapFamily> outer;
  std::shared_ptr<const MapFamily> inner;
};

struct WirtingerPair {
  Complex d_z;
  Complex d_zbar;

  double jacobian() const { return std::norm(d_z) - std::norm(d_zbar); }
};

/// Loci where a piecewise family's derivative jumps: circles |z| = r and
/// vertical lines Re z = x, in the coordinates of the map's domain.
struct BreakSet {
  std::vector<double> circles;
  std::vector<double> vertical_lines;

  bool empty() const { return circles.empty() && vertical_lines.empty(); }
};

/// Immutable closed-form planar map. Cheap to copy (compositions share their
/// factors).
class MapFamily {
 public:
  using Variant =
      std::variant<LinearStretch, InverseLinearStretch, SpiralStretch, InverseSpiralStretch,
                   PiecewiseLinearStretch, PiecewiseRadialStretch, ExpCoordinates, LogCoordinatesG,
                   ExpCoordinatesF, Rotation, Composition>;

  /// Throws InvalidInput when a parameter is out of range.
  explicit MapFamily(Variant v);

  const Variant& variant() const { return v_; }

  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&v_);
  }

  /// Short human-readable tag, e.g. "SpiralStretch(q=0.5,k=2,theta=0,N=0)".
  std::string describe() const;

 private:
  Variant v_;
};

/// outer o inner.
MapFamily compose(const MapFamily& outer, const MapFamily& inner);

/// Exact closed-form value. Throws DomainError at z = 0 for families that take
/// log|z|.
Complex eval(const MapFamily& map, Complex z);

/// Analytic (d/dz, d/dzbar). Compositions use the complex chain rule.
/// Throws BreakSetError on a break set.
WirtingerPair wirtinger(const MapFamily& map, Complex z);

inline constexpr double kDefaultFdStep = 1e-5;

/// Central differences along both axes, combined as
/// d_z = (f_x - i f_y)/2, d_zbar = (f_x + i f_y)/2. Throws BreakSetError if
/// either stencil crosses a break.
WirtingerPair wirtinger_fd(const MapFamily& map, Complex z, double h = kDefaultFdStep);

/// Closed-form inverse for the invertible families (both linear stretches,
/// both N = 0 spiral stretches, the three coordinate changes, rotations).
/// Throws Unsupported otherwise.
Complex invert(const MapFamily& map, Complex w);

/// The map's break set in its own domain coordinates. For compositions the
/// outer breaks are pulled back through the inner map; throws Unsupported if
/// a pull-back is not representable as circles or vertical lines.
BreakSet break_set(const MapFamily& map);

/// Inverse of a closed-form family as a MapFamily (used to form
/// g o (g*)^-1 and f o (f*)^-1). Throws Unsupported for non-invertible ones.
MapFamily inverse_family(const MapFamily& map);

/// The rectangle-side map G o g o E that corresponds to an annulus map g on
/// A_1 = {q <= |w| <= 1}, with l = log(1/q)/(2 pi) and the given k, n.
MapFamily rectangle_transfer(const MapFamily& annulus_map, double q, double k, double n);

/// l = log(1/q) / (2 pi).
double strip_width(double q);

}  // namespace qclab
