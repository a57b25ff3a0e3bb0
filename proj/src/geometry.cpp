#include "qclab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qclab/error.hpp"

namespace qclab {

namespace {

std::vector<double> sorted_breaks(std::span<const double> breaks, double lo, double hi,
                                  const char* what) {
  std::vector<double> out(breaks.begin(), breaks.end());
  for (double b : out) {
    if (!std::isfinite(b) || !(b > lo && b < hi)) {
      throw InvalidInput(std::string(what) + " break " + std::to_string(b) + " outside (" +
                         std::to_string(lo) + ", " + std::to_string(hi) + ")");
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Splits n cells among pieces proportionally to `lengths`, at least one each,
// using largest remainders.
std::vector<std::size_t> allocate_cells(std::size_t n, const std::vector<double>& lengths) {
  const double total = std::accumulate(lengths.begin(), lengths.end(), 0.0);
  std::vector<std::size_t> counts(lengths.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t used = 0;
  for (std::size_t s = 0; s < lengths.size(); ++s) {
    const double raw = static_cast<double>(n) * lengths[s] / total;
    counts[s] = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(raw)));
    used += counts[s];
    remainders.emplace_back(raw - std::floor(raw), s);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; used < n && r < remainders.size(); ++r, ++used) {
    ++counts[remainders[r].second];
  }
  return counts;
}

std::vector<double> split_edges(double lo, double hi, const std::vector<double>& breaks,
                                std::size_t n, bool geometric) {
  std::vector<double> knots;
  knots.push_back(lo);
  knots.insert(knots.end(), breaks.begin(), breaks.end());
  knots.push_back(hi);

  std::vector<double> lengths;
  for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
    lengths.push_back(geometric ? std::log(knots[s + 1] / knots[s]) : knots[s + 1] - knots[s]);
  }
  const auto counts = allocate_cells(n, lengths);

  std::vector<double> edges;
  edges.push_back(lo);
  for (std::size_t s = 0; s < counts.size(); ++s) {
    const double a = knots[s];
    const double b = knots[s + 1];
    const auto m = counts[s];
    for (std::size_t c = 1; c < m; ++c) {
      const double frac = static_cast<double>(c) / static_cast<double>(m);
      edges.push_back(geometric ? a * std::pow(b / a, frac) : a + (b - a) * frac);
    }
    edges.push_back(b);
  }
  return edges;
}

std::vector<double> uniform_edges(double lo, double hi, std::size_t n) {
  std::vector<double> edges(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
  }
  edges.back() = hi;
  return edges;
}

void require_counts(std::size_t a, std::size_t b) {
  if (a == 0 || b == 0) throw InvalidInput("grid resolution must be >= 1 in each direction");
}

// Index i with edges[i] <= x < edges[i+1]; x == edges.back() maps to the last cell.
std::pair<std::size_t, double> fractional_index(std::span<const double> edges, double x) {
  auto it = std::upper_bound(edges.begin(), edges.end(), x);
  std::size_t i = static_cast<std::size_t>(std::distance(edges.begin(), it));
  i = (i == 0) ? 0 : i - 1;
  i = std::min(i, edges.size() - 2);
  const double frac = (x - edges[i]) / (edges[i + 1] - edges[i]);
  return {i, std::clamp(frac, 0.0, 1.0)};
}

}  // namespace

AnnulusDomain AnnulusDomain::make(double inner_radius) {
  if (!(inner_radius > 0.0 && inner_radius < 1.0)) {
    throw InvalidInput("annulus inner radius must lie in (0, 1)");
  }
  return AnnulusDomain{inner_radius, 1.0};
}

double AnnulusDomain::area() const {
  return kPi * (outer_radius * outer_radius - inner_radius * inner_radius);
}

bool AnnulusDomain::contains(Complex w) const {
  const double r = std::abs(w);
  return r >= inner_radius && r <= outer_radius;
}

RectangleDomain RectangleDomain::make(double width) {
  if (!(width > 0.0) || !std::isfinite(width)) throw InvalidInput("rectangle width must be > 0");
  return RectangleDomain{width, 1.0};
}

bool RectangleDomain::contains(Complex z) const {
  return z.real() >= 0.0 && z.real() <= width && z.imag() >= 0.0 && z.imag() <= height;
}

ParallelogramDomain ParallelogramDomain::make(Complex base, Complex side) {
  if (!(base.real() > 0.0)) throw InvalidInput("parallelogram base must have positive real part");
  ParallelogramDomain d{base, side};
  if (!(d.area() > 0.0)) throw InvalidInput("parallelogram has zero area");
  return d;
}

double ParallelogramDomain::area() const {
  return std::abs(base.real() * side.imag() - base.imag() * side.real());
}

std::pair<double, double> ParallelogramDomain::coordinates(Complex w) const {
  const double det = base.real() * side.imag() - base.imag() * side.real();
  const double s = (w.real() * side.imag() - w.imag() * side.real()) / det;
  const double t = (base.real() * w.imag() - base.imag() * w.real()) / det;
  return {s, t};
}

bool ParallelogramDomain::contains(Complex w) const {
  const auto [s, t] = coordinates(w);
  return s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0;
}

double QuadratureGrid::total_weight() const {
  CompensatedSum sum;
  for (const auto& c : cells_) sum.add(c.weight);
  return sum.value();
}

bool QuadratureGrid::has_first_edge(double value, double rel_tol) const {
  const double tol = rel_tol * std::max(1.0, std::abs(value));
  return std::any_of(first_edges_.begin(), first_edges_.end(),
                     [&](double e) { return std::abs(e - value) <= tol; });
}

std::optional<std::pair<double, double>> QuadratureGrid::locate(Complex point) const {
  double a = 0.0;
  double b = 0.0;
  switch (kind_) {
    case CoordinateKind::polar: {
      a = std::abs(point);
      b = std::arg(point);
      if (b < 0.0) b += kTwoPi;
      if (b >= kTwoPi) b -= kTwoPi;
      break;
    }
    case CoordinateKind::cartesian:
      a = point.real();
      b = point.imag();
      break;
    case CoordinateKind::parallelogram: {
      std::tie(a, b) = parallelogram_.coordinates(point);
      break;
    }
  }
  if (a < first_edges_.front() || a > first_edges_.back()) return std::nullopt;
  if (b < second_edges_.front() || b > second_edges_.back()) return std::nullopt;
  const auto [i, fa] = fractional_index(first_edges_, a);
  const auto [j, fb] = fractional_index(second_edges_, b);
  return std::make_pair(static_cast<double>(i) + fa, static_cast<double>(j) + fb);
}

QuadratureGrid build_polar_grid(const AnnulusDomain& annulus, std::size_t n_radial,
                                std::size_t n_angular, std::span<const double> mandatory_breaks,
                                RadialSpacing spacing) {
  require_counts(n_radial, n_angular);
  const double q = annulus.inner_radius;
  const double outer = annulus.outer_radius;
  QuadratureGrid grid;
  grid.kind_ = CoordinateKind::polar;
  grid.breaks_ = sorted_breaks(mandatory_breaks, q, outer, "radial");
  grid.first_edges_ =
      split_edges(q, outer, grid.breaks_, n_radial, spacing == RadialSpacing::geometric);
  grid.second_edges_ = uniform_edges(0.0, kTwoPi, n_angular);

  const double da = kTwoPi / static_cast<double>(n_angular);
  grid.cells_.reserve(grid.n_first() * n_angular);
  for (std::size_t i = 0; i + 1 < grid.first_edges_.size(); ++i) {
    const double r0 = grid.first_edges_[i];
    const double r1 = grid.first_edges_[i + 1];
    const double r_mid = 0.5 * (r0 + r1);
    const double weight = r_mid * (r1 - r0) * da;
    for (std::size_t j = 0; j < n_angular; ++j) {
      const double a_mid = (static_cast<double>(j) + 0.5) * da;
      grid.cells_.push_back({std::polar(r_mid, a_mid), weight});
    }
  }
  return grid;
}

QuadratureGrid build_cartesian_grid(const RectangleDomain& rect, std::size_t n_x, std::size_t n_y,
                                    std::span<const double> mandatory_breaks) {
  require_counts(n_x, n_y);
  QuadratureGrid grid;
  grid.kind_ = CoordinateKind::cartesian;
  grid.breaks_ = sorted_breaks(mandatory_breaks, 0.0, rect.width, "abscissa");
  grid.first_edges_ = split_edges(0.0, rect.width, grid.breaks_, n_x, false);
  grid.second_edges_ = uniform_edges(0.0, rect.height, n_y);

  grid.cells_.reserve(grid.n_first() * n_y);
  for (std::size_t i = 0; i + 1 < grid.first_edges_.size(); ++i) {
    const double x0 = grid.first_edges_[i];
    const double x1 = grid.first_edges_[i + 1];
    for (std::size_t j = 0; j < n_y; ++j) {
      const double y0 = grid.second_edges_[j];
      const double y1 = grid.second_edges_[j + 1];
      grid.cells_.push_back({Complex{0.5 * (x0 + x1), 0.5 * (y0 + y1)}, (x1 - x0) * (y1 - y0)});
    }
  }
  return grid;
}

QuadratureGrid build_parallelogram_grid(const ParallelogramDomain& domain, std::size_t n_s,
                                        std::size_t n_t, std::span<const double> mandatory_breaks) {
  require_counts(n_s, n_t);
  QuadratureGrid grid;
  grid.kind_ = CoordinateKind::parallelogram;
  grid.parallelogram_ = domain;
  grid.breaks_ = sorted_breaks(mandatory_breaks, 0.0, 1.0, "base-parameter");
  grid.first_edges_ = split_edges(0.0, 1.0, grid.breaks_, n_s, false);
  grid.second_edges_ = uniform_edges(0.0, 1.0, n_t);

  const double area = domain.area();
  grid.cells_.reserve(grid.n_first() * n_t);
  for (std::size_t i = 0; i + 1 < grid.first_edges_.size(); ++i) {
    const double s0 = grid.first_edges_[i];
    const double s1 = grid.first_edges_[i + 1];
    for (std::size_t j = 0; j < n_t; ++j) {
      const double t0 = grid.second_edges_[j];
      const double t1 = grid.second_edges_[j + 1];
      const Complex center = 0.5 * (s0 + s1) * domain.base + 0.5 * (t0 + t1) * domain.side;
      grid.cells_.push_back({center, area * (s1 - s0) * (t1 - t0)});
    }
  }
  return grid;
}

double compensated_dot(std::span<const double> weights, std::span<const double> samples) {
  if (weights.size() != samples.size()) {
    throw InvalidInput("sample count " + std::to_string(samples.size()) +
                       " does not match cell count " + std::to_string(weights.size()));
  }
  CompensatedSum sum;
  double product_errors = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      throw PropagationError("non-finite sample at cell " + std::to_string(i));
    }
    const double p = weights[i] * samples[i];
    product_errors += std::fma(weights[i], samples[i], -p);
    sum.add(p);
  }
  sum.add(product_errors);
  return sum.value();
}

double integrate(const QuadratureGrid& grid, std::span<const double> samples) {
  std::vector<double> weights(grid.size());
  const auto cells = grid.cells();
  for (std::size_t i = 0; i < cells.size(); ++i) weights[i] = cells[i].weight;
  return compensated_dot(weights, samples);
}

}  // namespace qclab
