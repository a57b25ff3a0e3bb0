#include "qclab/map_zoo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qclab/error.hpp"
#include "qclab/report.hpp"

namespace qclab {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kBreakTol = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidInput(message);
}

void require_q(double q) { require(q > 0.0 && q < 1.0, "q must lie in (0, 1)"); }

void require_eps(double k, double eps) {
  require(k > 1.0, "k must be > 1 for the piecewise families");
  require(eps > 0.0, "eps must be > 0");
  require(eps < (k - 1.0) * (k - 1.0), "eps must be < (k-1)^2");
}

void validate(const MapFamily::Variant& v) {
  std::visit(
      Overloaded{
          [](const LinearStretch& m) {
            require(m.k > 0.0 && std::isfinite(m.k) && std::isfinite(m.n), "k must be > 0");
          },
          [](const InverseLinearStretch& m) {
            require(m.k > 0.0 && std::isfinite(m.k) && std::isfinite(m.n), "k must be > 0");
          },
          [](const SpiralStretch& m) {
            require_q(m.q);
            require(m.k > 0.0 && std::isfinite(m.k), "k must be > 0");
            require(std::abs(m.theta) <= kPi + 1e-12, "theta must lie in [-pi, pi]");
          },
          [](const InverseSpiralStretch& m) {
            require_q(m.q);
            require(m.k > 0.0 && std::isfinite(m.k), "k must be > 0");
            require(std::abs(m.theta) <= kPi + 1e-12, "theta must lie in [-pi, pi]");
          },
          [](const PiecewiseLinearStretch& m) {
            require_eps(m.k, m.eps);
            require(m.ell > 0.0 && std::isfinite(m.ell), "ell must be > 0");
          },
          [](const PiecewiseRadialStretch& m) {
            require_q(m.q);
            require_eps(m.k, m.eps);
          },
          [](const ExpCoordinates& m) { require_q(m.q); },
          [](const LogCoordinatesG& m) {
            require_q(m.q);
            require(m.k > 0.0 && std::isfinite(m.k) && std::isfinite(m.n), "k must be > 0");
            require(std::abs(m.ell - strip_width(m.q)) <= 1e-12 * strip_width(m.q),
                    "ell must equal log(1/q)/(2 pi)");
          },
          [](const ExpCoordinatesF& m) {
            require_q(m.q);
            require(m.k > 0.0 && std::isfinite(m.k), "k must be > 0");
          },
          [](const Rotation& m) { require(std::isfinite(m.angle), "rotation angle must be finite"); },
          [](const Composition& m) {
            require(m.outer != nullptr && m.inner != nullptr, "composition factors must be set");
          },
      },
      v);
}

double nonzero_modulus(Complex z, const char* what) {
  const double r = std::abs(z);
  if (!(r > 0.0)) throw DomainError(std::string(what) + " is undefined at 0");
  return r;
}

// exp(i beta log r) * r^(k-1), the common factor of the spiral derivatives.
double spiral_beta(const SpiralStretch& m) {
  return (m.theta + kTwoPi * static_cast<double>(m.N)) / std::log(m.q);
}

Complex spiral_eval(const SpiralStretch& m, Complex w) {
  const double r = nonzero_modulus(w, "spiral stretch");
  const double beta = spiral_beta(m);
  return w * std::pow(r, m.k - 1.0) * std::polar(1.0, beta * std::log(r));
}

WirtingerPair spiral_wirtinger(const SpiralStretch& m, Complex w) {
  const double r = nonzero_modulus(w, "spiral stretch");
  const double beta = spiral_beta(m);
  const Complex c{0.5 * (m.k - 1.0), 0.5 * beta};
  const Complex p = std::pow(r, m.k - 1.0) * std::polar(1.0, beta * std::log(r));
  const Complex phase = w / std::conj(w);
  return {(1.0 + c) * p, c * p * phase};
}

Complex inverse_spiral_eval(const InverseSpiralStretch& m, Complex w) {
  const double r = nonzero_modulus(w, "inverse spiral stretch");
  const double rho = std::pow(r, 1.0 / m.k);
  const double angle = std::arg(w) - m.theta * std::log(rho) / std::log(m.q);
  return std::polar(rho, angle);
}

double radial_slope(const PiecewiseRadialStretch& m, double r) {
  const double s = std::sqrt(m.eps);
  return r <= std::sqrt(m.q) ? m.k - s : m.k + s;
}

double radial_factor(const PiecewiseRadialStretch& m, double r) {
  return r <= std::sqrt(m.q) ? std::pow(m.q, std::sqrt(m.eps)) : 1.0;
}

// Angle in [lo, lo + 2 pi).
double wrap_angle(double angle, double lo) {
  double a = std::fmod(angle - lo, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a -= kTwoPi;
  return lo + a;
}

Complex log_g_eval(const LogCoordinatesG& m, Complex w) {
  const double r = nonzero_modulus(w, "log coordinates");
  const double log_r = std::log(r);
  const double cut = m.n * log_r / m.k;
  const double angle = wrap_angle(std::arg(w), cut);
  return Complex{log_r, angle} / kTwoPi + Complex{m.k * m.ell, m.n * m.ell};
}

// log(w / scale) / (2 pi) with the argument in [0, 2 pi).
Complex log_strip(Complex w, double scale) {
  const double r = nonzero_modulus(w, "inverse exponential coordinates");
  return Complex{std::log(r / scale), wrap_angle(std::arg(w), 0.0)} / kTwoPi;
}

Complex piecewise_linear_eval(const PiecewiseLinearStretch& m, Complex z) {
  const double s = std::sqrt(m.eps);
  const double x = z.real();
  const double gx = x <= 0.5 * m.ell ? (m.k + s) * x : (m.k - s) * x + s * m.ell;
  return Complex{gx, z.imag()};
}

WirtingerPair from_partials(Complex f_x, Complex f_y) {
  return {0.5 * (f_x - kI * f_y), 0.5 * (f_x + kI * f_y)};
}

WirtingerPair inverse_pair(const WirtingerPair& forward) {
  const double jac = forward.jacobian();
  if (!(jac > 0.0)) throw DomainError("inverse derivative needs a positive Jacobian");
  return {std::conj(forward.d_z) / jac, -forward.d_zbar / jac};
}

BreakSet pullback(const MapFamily& map, const BreakSet& target);

}  // namespace

double strip_width(double q) { return std::log(1.0 / q) / kTwoPi; }

MapFamily::MapFamily(Variant v) : v_(std::move(v)) { validate(v_); }

std::string MapFamily::describe() const {
  std::ostringstream os;
  const auto f = [](double x) { return format_double(x); };
  std::visit(Overloaded{
                 [&](const LinearStretch& m) {
                   os << "LinearStretch(k=" << f(m.k) << ",n=" << f(m.n) << ")";
                 },
                 [&](const InverseLinearStretch& m) {
                   os << "InverseLinearStretch(k=" << f(m.k) << ",n=" << f(m.n) << ")";
                 },
                 [&](const SpiralStretch& m) {
                   os << "SpiralStretch(q=" << f(m.q) << ",k=" << f(m.k) << ",theta=" << f(m.theta)
                      << ",N=" << m.N << ")";
                 },
                 [&](const InverseSpiralStretch& m) {
                   os << "InverseSpiralStretch(q=" << f(m.q) << ",k=" << f(m.k)
                      << ",theta=" << f(m.theta) << ")";
                 },
                 [&](const PiecewiseLinearStretch& m) {
                   os << "PiecewiseLinearStretch(k=" << f(m.k) << ",eps=" << f(m.eps)
                      << ",ell=" << f(m.ell) << ")";
                 },
                 [&](const PiecewiseRadialStretch& m) {
                   os << "PiecewiseRadialStretch(q=" << f(m.q) << ",k=" << f(m.k)
                      << ",eps=" << f(m.eps) << ")";
                 },
                 [&](const ExpCoordinates& m) { os << "ExpCoordinates(q=" << f(m.q) << ")"; },
                 [&](const LogCoordinatesG& m) {
                   os << "LogCoordinatesG(q=" << f(m.q) << ",k=" << f(m.k) << ",ell=" << f(m.ell)
                      << ",n=" << f(m.n) << ")";
                 },
                 [&](const ExpCoordinatesF& m) {
                   os << "ExpCoordinatesF(q=" << f(m.q) << ",k=" << f(m.k) << ")";
                 },
                 [&](const Rotation& m) { os << "Rotation(angle=" << f(m.angle) << ")"; },
                 [&](const Composition& m) {
                   os << "Composition(" << m.outer->describe() << "," << m.inner->describe()
                      << ")";
                 },
             },
             v_);
  return os.str();
}

MapFamily compose(const MapFamily& outer, const MapFamily& inner) {
  return MapFamily{Composition{std::make_shared<const MapFamily>(outer),
                               std::make_shared<const MapFamily>(inner)}};
}

Complex eval(const MapFamily& map, Complex z) {
  return std::visit(
      Overloaded{
          [&](const LinearStretch& m) {
            return Complex{m.k * z.real(), m.n * z.real() + z.imag()};
          },
          [&](const InverseLinearStretch& m) {
            const double x = z.real() / m.k;
            return Complex{x, z.imag() - m.n * x};
          },
          [&](const SpiralStretch& m) { return spiral_eval(m, z); },
          [&](const InverseSpiralStretch& m) { return inverse_spiral_eval(m, z); },
          [&](const PiecewiseLinearStretch& m) { return piecewise_linear_eval(m, z); },
          [&](const PiecewiseRadialStretch& m) {
            const double r = nonzero_modulus(z, "piecewise radial stretch");
            return radial_factor(m, r) * z * std::pow(r, radial_slope(m, r) - 1.0);
          },
          [&](const ExpCoordinates& m) { return m.q * std::exp(kTwoPi * z); },
          [&](const LogCoordinatesG& m) { return log_g_eval(m, z); },
          [&](const ExpCoordinatesF& m) { return std::pow(m.q, m.k) * std::exp(kTwoPi * z); },
          [&](const Rotation& m) { return std::polar(1.0, m.angle) * z; },
          [&](const Composition& m) { return eval(*m.outer, eval(*m.inner, z)); },
      },
      map.variant());
}

WirtingerPair wirtinger(const MapFamily& map, Complex z) {
  return std::visit(
      Overloaded{
          [&](const LinearStretch& m) -> WirtingerPair {
            return {Complex{0.5 * (m.k + 1.0), 0.5 * m.n}, Complex{0.5 * (m.k - 1.0), 0.5 * m.n}};
          },
          [&](const InverseLinearStretch& m) -> WirtingerPair {
            return from_partials(Complex{1.0 / m.k, -m.n / m.k}, kI);
          },
          [&](const SpiralStretch& m) { return spiral_wirtinger(m, z); },
          [&](const InverseSpiralStretch& m) {
            const Complex preimage = inverse_spiral_eval(m, z);
            return inverse_pair(spiral_wirtinger(SpiralStretch{m.q, m.k, m.theta, 0}, preimage));
          },
          [&](const PiecewiseLinearStretch& m) -> WirtingerPair {
            const double half = 0.5 * m.ell;
            if (std::abs(z.real() - half) <= kBreakTol * std::max(1.0, half)) {
              throw BreakSetError("derivative requested on the break line x = ell/2");
            }
            const double s = std::sqrt(m.eps);
            const double slope = z.real() < half ? m.k + s : m.k - s;
            return from_partials(Complex{slope, 0.0}, kI);
          },
          [&](const PiecewiseRadialStretch& m) -> WirtingerPair {
            const double r = nonzero_modulus(z, "piecewise radial stretch");
            if (std::abs(r - std::sqrt(m.q)) <= kBreakTol) {
              throw BreakSetError("derivative requested on the break circle |w| = sqrt(q)");
            }
            const double a = radial_slope(m, r);
            const double scale = radial_factor(m, r) * std::pow(r, a - 1.0);
            return {Complex{0.5 * (a + 1.0) * scale, 0.0}, 0.5 * (a - 1.0) * scale * z / std::conj(z)};
          },
          [&](const ExpCoordinates& m) -> WirtingerPair {
            return {kTwoPi * m.q * std::exp(kTwoPi * z), 0.0};
          },
          [&](const LogCoordinatesG&) -> WirtingerPair {
            nonzero_modulus(z, "log coordinates");
            return {1.0 / (kTwoPi * z), 0.0};
          },
          [&](const ExpCoordinatesF& m) -> WirtingerPair {
            return {kTwoPi * std::pow(m.q, m.k) * std::exp(kTwoPi * z), 0.0};
          },
          [&](const Rotation& m) -> WirtingerPair { return {std::polar(1.0, m.angle), 0.0}; },
          [&](const Composition& m) -> WirtingerPair {
            const WirtingerPair in = wirtinger(*m.inner, z);
            const WirtingerPair out = wirtinger(*m.outer, eval(*m.inner, z));
            return {out.d_z * in.d_z + out.d_zbar * std::conj(in.d_zbar),
                    out.d_z * in.d_zbar + out.d_zbar * std::conj(in.d_z)};
          },
      },
      map.variant());
}

namespace {

bool segment_crosses(const BreakSet& breaks, Complex a, Complex b) {
  for (double radius : breaks.circles) {
    const Complex d = b - a;
    const double t = std::clamp(-(std::real(std::conj(d) * a)) / std::norm(d), 0.0, 1.0);
    const double r_min = std::abs(a + t * d);
    const double r_max = std::max(std::abs(a), std::abs(b));
    if (r_min <= radius && radius <= r_max) return true;
  }
  for (double x : breaks.vertical_lines) {
    const double lo = std::min(a.real(), b.real());
    const double hi = std::max(a.real(), b.real());
    if (lo <= x && x <= hi) return true;
  }
  return false;
}

}  // namespace

WirtingerPair wirtinger_fd(const MapFamily& map, Complex z, double h) {
  if (!(h > 0.0)) throw InvalidInput("finite-difference step must be > 0");
  const BreakSet breaks = break_set(map);
  const Complex dx{h, 0.0};
  const Complex dy{0.0, h};
  if (segment_crosses(breaks, z - dx, z + dx) || segment_crosses(breaks, z - dy, z + dy)) {
    throw BreakSetError("finite-difference stencil crosses a break set");
  }
  const Complex f_x = (eval(map, z + dx) - eval(map, z - dx)) / (2.0 * h);
  const Complex f_y = (eval(map, z + dy) - eval(map, z - dy)) / (2.0 * h);
  return from_partials(f_x, f_y);
}

Complex invert(const MapFamily& map, Complex w) {
  return std::visit(
      Overloaded{
          [&](const LinearStretch& m) { return eval(MapFamily{InverseLinearStretch{m.k, m.n}}, w); },
          [&](const InverseLinearStretch& m) { return eval(MapFamily{LinearStretch{m.k, m.n}}, w); },
          [&](const SpiralStretch& m) -> Complex {
            if (m.N != 0) throw Unsupported("only the N = 0 spiral stretch has a closed-form inverse");
            return inverse_spiral_eval(InverseSpiralStretch{m.q, m.k, m.theta}, w);
          },
          [&](const InverseSpiralStretch& m) {
            return spiral_eval(SpiralStretch{m.q, m.k, m.theta, 0}, w);
          },
          [&](const ExpCoordinates& m) { return log_strip(w, m.q); },
          [&](const LogCoordinatesG& m) {
            return std::exp(kTwoPi * (w - Complex{m.k * m.ell, m.n * m.ell}));
          },
          [&](const ExpCoordinatesF& m) { return log_strip(w, std::pow(m.q, m.k)); },
          [&](const Rotation& m) { return std::polar(1.0, -m.angle) * w; },
          [&](const auto&) -> Complex {
            throw Unsupported("no closed-form inverse for " + map.describe());
          },
      },
      map.variant());
}

MapFamily inverse_family(const MapFamily& map) {
  return std::visit(
      Overloaded{
          [](const LinearStretch& m) { return MapFamily{InverseLinearStretch{m.k, m.n}}; },
          [](const InverseLinearStretch& m) { return MapFamily{LinearStretch{m.k, m.n}}; },
          [](const SpiralStretch& m) {
            if (m.N != 0) throw Unsupported("only the N = 0 spiral stretch has a closed-form inverse");
            return MapFamily{InverseSpiralStretch{m.q, m.k, m.theta}};
          },
          [](const InverseSpiralStretch& m) { return MapFamily{SpiralStretch{m.q, m.k, m.theta, 0}}; },
          [](const Rotation& m) { return MapFamily{Rotation{-m.angle}}; },
          [&](const auto&) -> MapFamily {
            throw Unsupported("no closed-form inverse family for " + map.describe());
          },
      },
      map.variant());
}

namespace {

BreakSet merge(BreakSet a, const BreakSet& b) {
  a.circles.insert(a.circles.end(), b.circles.begin(), b.circles.end());
  a.vertical_lines.insert(a.vertical_lines.end(), b.vertical_lines.begin(), b.vertical_lines.end());
  std::sort(a.circles.begin(), a.circles.end());
  std::sort(a.vertical_lines.begin(), a.vertical_lines.end());
  return a;
}

[[noreturn]] void unrepresentable(const MapFamily& map, const char* what) {
  throw Unsupported(std::string("cannot pull back ") + what + " through " + map.describe());
}

BreakSet pullback(const MapFamily& map, const BreakSet& target) {
  if (target.empty()) return {};
  BreakSet out;
  const auto circles_to_circles = [&](auto&& radius_map) {
    if (!target.vertical_lines.empty()) unrepresentable(map, "vertical lines");
    for (double a : target.circles) out.circles.push_back(radius_map(a));
  };
  const auto lines_to_lines = [&](auto&& abscissa_map) {
    if (!target.circles.empty()) unrepresentable(map, "circles");
    for (double a : target.vertical_lines) out.vertical_lines.push_back(abscissa_map(a));
  };
  const auto circles_to_lines = [&](auto&& radius_to_abscissa) {
    if (!target.vertical_lines.empty()) unrepresentable(map, "vertical lines");
    for (double a : target.circles) out.vertical_lines.push_back(radius_to_abscissa(a));
  };
  const auto lines_to_circles = [&](auto&& abscissa_to_radius) {
    if (!target.circles.empty()) unrepresentable(map, "circles");
    for (double a : target.vertical_lines) out.circles.push_back(abscissa_to_radius(a));
  };

  std::visit(
      Overloaded{
          [&](const LinearStretch& m) { lines_to_lines([&](double a) { return a / m.k; }); },
          [&](const InverseLinearStretch& m) { lines_to_lines([&](double a) { return a * m.k; }); },
          [&](const SpiralStretch& m) {
            circles_to_circles([&](double a) { return std::pow(a, 1.0 / m.k); });
          },
          [&](const InverseSpiralStretch& m) {
            circles_to_circles([&](double a) { return std::pow(a, m.k); });
          },
          [&](const PiecewiseLinearStretch& m) {
            const double s = std::sqrt(m.eps);
            const double knee = (m.k + s) * 0.5 * m.ell;
            lines_to_lines([&](double a) {
              return a <= knee ? a / (m.k + s) : (a - s * m.ell) / (m.k - s);
            });
          },
          [&](const PiecewiseRadialStretch& m) {
            const double s = std::sqrt(m.eps);
            const double knee = std::pow(std::sqrt(m.q), m.k + s);
            circles_to_circles([&](double a) {
              return a >= knee ? std::pow(a, 1.0 / (m.k + s))
                               : std::pow(a / std::pow(m.q, s), 1.0 / (m.k - s));
            });
          },
          [&](const ExpCoordinates& m) {
            circles_to_lines([&](double a) { return std::log(a / m.q) / kTwoPi; });
          },
          [&](const ExpCoordinatesF& m) {
            circles_to_lines([&](double a) { return std::log(a / std::pow(m.q, m.k)) / kTwoPi; });
          },
          [&](const LogCoordinatesG& m) {
            lines_to_circles([&](double a) { return std::exp(kTwoPi * (a - m.k * m.ell)); });
          },
          [&](const Rotation&) { circles_to_circles([](double a) { return a; }); },
          [&](const Composition& m) { out = pullback(*m.inner, pullback(*m.outer, target)); },
      },
      map.variant());
  return out;
}

}  // namespace

BreakSet break_set(const MapFamily& map) {
  return std::visit(
      Overloaded{
          [](const PiecewiseLinearStretch& m) { return BreakSet{{}, {0.5 * m.ell}}; },
          [](const PiecewiseRadialStretch& m) { return BreakSet{{std::sqrt(m.q)}, {}}; },
          [](const Composition& m) {
            return merge(break_set(*m.inner), pullback(*m.inner, break_set(*m.outer)));
          },
          [](const auto&) { return BreakSet{}; },
      },
      map.variant());
}

MapFamily rectangle_transfer(const MapFamily& annulus_map, double q, double k, double n) {
  const MapFamily log_g{LogCoordinatesG{q, k, strip_width(q), n}};
  const MapFamily exp_e{ExpCoordinates{q}};
  return compose(log_g, compose(annulus_map, exp_e));
}

}  // namespace qclab
