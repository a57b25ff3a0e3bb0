#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "catch_amalgamated.hpp"
#include "qclab/error.hpp"
#include "qclab/geometry.hpp"

using namespace qclab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> inverse_square_samples(const QuadratureGrid& grid) {
  return sample_cells(grid, [](Complex w) { return 1.0 / std::norm(w); });
}

double inverse_square_error(std::size_t n) {
  const auto grid = build_polar_grid(AnnulusDomain::make(0.5), n, n);
  return std::abs(integrate(grid, inverse_square_samples(grid)) - kTwoPi * std::log(2.0));
}

}  // namespace

TEST_CASE("polar grid weights reproduce the annulus area", "[geometry]") {
  const auto annulus = AnnulusDomain::make(0.5);
  const auto grid = build_polar_grid(annulus, 64, 64);
  REQUIRE(grid.size() == 64 * 64);
  for (const auto& c : grid.cells()) REQUIRE(c.weight > 0.0);
  CHECK_THAT(grid.total_weight(), WithinRel(kPi * 0.75, 1e-12));
  CHECK_THAT(annulus.area(), WithinRel(2.356194490192345, 1e-15));
}

TEST_CASE("polar grid places mandatory breaks on cell boundaries", "[geometry]") {
  const double brk = std::sqrt(0.5);
  const std::vector<double> breaks{brk};
  for (auto spacing : {RadialSpacing::uniform, RadialSpacing::geometric}) {
    const auto grid = build_polar_grid(AnnulusDomain::make(0.5), 37, 16, breaks, spacing);
    CHECK(grid.has_first_edge(brk));
    CHECK(grid.n_first() == 37);
    CHECK_THAT(grid.total_weight(), WithinRel(kPi * 0.75, 1e-12));
    for (const auto& c : grid.cells()) {
      const double r = std::abs(c.center);
      const auto it = std::upper_bound(grid.first_edges().begin(), grid.first_edges().end(), r);
      const double lo = *(it - 1);
      const double hi = *it;
      CHECK(!(lo < brk && brk < hi));
    }
  }
}

TEST_CASE("grid builders reject breaks outside the domain", "[geometry]") {
  const std::vector<double> inside_hole{0.4};
  CHECK_THROWS_AS(build_polar_grid(AnnulusDomain::make(0.5), 8, 8, inside_hole), InvalidInput);
  const std::vector<double> past_edge{1.5};
  CHECK_THROWS_AS(build_cartesian_grid(RectangleDomain::make(1.0), 8, 8, past_edge), InvalidInput);
  CHECK_THROWS_AS(AnnulusDomain::make(1.0), InvalidInput);
  CHECK_THROWS_AS(AnnulusDomain::make(0.0), InvalidInput);
  CHECK_THROWS_AS(RectangleDomain::make(-1.0), InvalidInput);
  CHECK_THROWS_AS(build_polar_grid(AnnulusDomain::make(0.5), 0, 8), InvalidInput);
}

TEST_CASE("cartesian grid", "[geometry]") {
  const std::vector<double> half{0.5};
  const auto grid = build_cartesian_grid(RectangleDomain::make(1.0), 32, 32, half);
  CHECK_THAT(grid.total_weight(), WithinRel(1.0, 1e-12));
  CHECK(grid.has_first_edge(0.5));

  const auto single = build_cartesian_grid(RectangleDomain::make(1.0), 1, 1);
  REQUIRE(single.size() == 1);
  CHECK(single.cells()[0].center == Complex(0.5, 0.5));
  CHECK(single.cells()[0].weight == 1.0);

  const std::vector<double> odd_break{0.3};
  const auto uneven = build_cartesian_grid(RectangleDomain::make(2.0), 7, 3, odd_break);
  CHECK(uneven.has_first_edge(0.3));
  CHECK_THAT(uneven.total_weight(), WithinRel(2.0, 1e-12));
}

TEST_CASE("parallelogram grid", "[geometry]") {
  const auto domain = ParallelogramDomain::make(Complex{2.0, 0.7});
  CHECK_THAT(domain.area(), WithinRel(2.0, 1e-15));
  const std::vector<double> half{0.5};
  const auto grid = build_parallelogram_grid(domain, 20, 10, half);
  CHECK_THAT(grid.total_weight(), WithinRel(2.0, 1e-12));
  CHECK(grid.has_first_edge(0.5));
  for (const auto& c : grid.cells()) CHECK(domain.contains(c.center));
  const auto [s, t] = domain.coordinates(Complex{2.0, 0.7} * 0.25 + Complex{0.0, 0.5});
  CHECK_THAT(s, WithinAbs(0.25, 1e-15));
  CHECK_THAT(t, WithinAbs(0.5, 1e-15));
  CHECK_THROWS_AS(ParallelogramDomain::make(Complex{-1.0, 0.0}), InvalidInput);
  CHECK_THROWS_AS(ParallelogramDomain::make(Complex{1.0, 1.0}, Complex{2.0, 2.0}), InvalidInput);
}

TEST_CASE("integrate reproduces the area and the 1/r^2 integral", "[geometry]") {
  const auto grid = build_polar_grid(AnnulusDomain::make(0.5), 64, 32);
  const std::vector<double> ones(grid.size(), 1.0);
  CHECK_THAT(integrate(grid, ones), WithinRel(kPi * 0.75, 1e-12));

  const auto fine = build_polar_grid(AnnulusDomain::make(0.5), 512, 512);
  CHECK_THAT(integrate(fine, inverse_square_samples(fine)), WithinRel(kTwoPi * std::log(2.0), 1e-6));
}

TEST_CASE("integrate rejects mismatched and non-finite samples", "[geometry]") {
  const auto grid = build_cartesian_grid(RectangleDomain::make(1.0), 4, 4);
  std::vector<double> short_samples(grid.size() - 1, 1.0);
  CHECK_THROWS_AS(integrate(grid, short_samples), InvalidInput);
  std::vector<double> samples(grid.size(), 1.0);
  samples[5] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH(integrate(grid, samples), Catch::Matchers::ContainsSubstring("cell 5"));
  CHECK_THROWS_AS(integrate(grid, samples), PropagationError);
}

TEST_CASE("midpoint error decays at second order", "[geometry]") {
  const double e1 = inverse_square_error(32);
  const double e2 = inverse_square_error(64);
  const double e3 = inverse_square_error(128);
  CHECK(e1 / e2 >= 3.5);
  CHECK(e1 / e2 <= 4.5);
  CHECK(e2 / e3 >= 3.5);
  CHECK(e2 / e3 <= 4.5);
}

TEST_CASE("compensated dot product is order independent", "[geometry]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> w(20000);
  std::vector<double> s(20000);
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::abs(dist(rng)) * std::pow(10.0, 8.0 * dist(rng));
    s[i] = dist(rng);
  }
  const double forward = compensated_dot(w, s);
  CHECK(compensated_dot(w, s) == forward);

  std::vector<std::size_t> order(w.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<double> w2;
  std::vector<double> s2;
  for (auto i : order) {
    w2.push_back(w[i]);
    s2.push_back(s[i]);
  }
  double scale = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) scale += std::abs(w[i] * s[i]);
  CHECK(std::abs(compensated_dot(w2, s2) - forward) <= 1e-14 * std::abs(forward));
  CHECK(std::abs(compensated_dot(w2, s2) - forward) <= 1e-15 * scale);
}

TEST_CASE("sampling is independent of the thread count", "[geometry]") {
  const auto grid = build_polar_grid(AnnulusDomain::make(0.3), 128, 64);
  const auto f = [](Complex w) { return std::sin(3.0 * w.real()) / std::norm(w); };
  setenv("QCLAB_THREADS", "1", 1);
  const double one = integrate(grid, sample_cells(grid, f));
  setenv("QCLAB_THREADS", "4", 1);
  const double four = integrate(grid, sample_cells(grid, f));
  unsetenv("QCLAB_THREADS");
  CHECK(one == four);
}

TEST_CASE("parallel_for rethrows the lowest failing index", "[geometry]") {
  setenv("QCLAB_THREADS", "4", 1);
  try {
    parallel_for(100, [](std::size_t i) {
      if (i == 30 || i == 90) throw InvalidInput("index " + std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()) == "index 30");
  }
  unsetenv("QCLAB_THREADS");
}

TEST_CASE("locate returns fractional cell coordinates", "[geometry]") {
  const auto grid = build_cartesian_grid(RectangleDomain::make(2.0), 4, 4);
  const auto at = grid.locate(Complex{0.75, 0.375});
  REQUIRE(at.has_value());
  CHECK_THAT(at->first, WithinAbs(1.5, 1e-12));
  CHECK_THAT(at->second, WithinAbs(1.5, 1e-12));
  CHECK_FALSE(grid.locate(Complex{2.5, 0.5}).has_value());

  const auto polar = build_polar_grid(AnnulusDomain::make(0.5), 10, 8);
  const auto p = polar.locate(std::polar(0.5 + 0.05 * 3.5, kTwoPi / 8.0 * 2.5));
  REQUIRE(p.has_value());
  CHECK_THAT(p->first, WithinAbs(3.5, 1e-9));
  CHECK_THAT(p->second, WithinAbs(2.5, 1e-9));
  CHECK_FALSE(polar.locate(Complex{0.1, 0.0}).has_value());
}
