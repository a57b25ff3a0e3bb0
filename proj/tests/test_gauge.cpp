#include <cmath>

#include "catch_amalgamated.hpp"
#include "qclab/error.hpp"
#include "qclab/gauge.hpp"

using namespace qclab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("gauge values", "[gauge]") {
  CHECK(ConvexGauge::square().evaluate(1.0) == 1.0);
  CHECK(ConvexGauge::flat().evaluate(1.0) == 1.0);
  CHECK_THAT(ConvexGauge::flat().evaluate(2.0), WithinRel(2.0 + std::exp(-1.0), 1e-15));
  CHECK(ConvexGauge::linear().evaluate(3.7) == 3.7);
  CHECK_THAT(ConvexGauge::power(3.0).evaluate(2.0), WithinRel(8.0, 1e-15));
  CHECK_THROWS_AS(ConvexGauge::square().evaluate(0.99), DomainError);
  CHECK_THROWS_AS(ConvexGauge::flat().right_derivative(0.5), DomainError);
}

TEST_CASE("right derivatives", "[gauge]") {
  CHECK(ConvexGauge::square().right_derivative(3.0) == 6.0);
  CHECK(ConvexGauge::flat().right_derivative(1.0) == 1.0);
  CHECK(ConvexGauge::linear().right_derivative(17.0) == 1.0);
  // Central difference of the flat gauge away from 1.
  const auto flat = ConvexGauge::flat();
  const double t = 1.6;
  const double h = 1e-6;
  CHECK_THAT(flat.right_derivative(t), WithinRel((flat.evaluate(t + h) - flat.evaluate(t - h)) / (2 * h), 1e-8));
}

TEST_CASE("parsing gauge names", "[gauge]") {
  CHECK(ConvexGauge::parse("linear").kind() == GaugeKind::linear);
  CHECK(ConvexGauge::parse("square").curvature_floor() == 2.0);
  CHECK(ConvexGauge::parse("power:3").curvature_floor() == 6.0);
  CHECK(ConvexGauge::parse("power:1.5").curvature_floor() == 0.0);
  CHECK(ConvexGauge::parse("flat").curvature_floor() == 0.0);
  CHECK(ConvexGauge::parse("power:2.5").name() == "power:2.5");
  CHECK_THROWS_AS(ConvexGauge::parse("cubic"), InvalidInput);
  CHECK_THROWS_AS(ConvexGauge::parse("power:x"), InvalidInput);
  CHECK_THROWS_AS(ConvexGauge::parse("power:0.5"), InvalidInput);
}

TEST_CASE("declared curvature floors", "[gauge]") {
  CHECK(ConvexGauge::square().with_declared_floor(1.0).curvature_floor() == 1.0);
  CHECK_THROWS_AS(ConvexGauge::flat().with_declared_floor(1.0), Unsupported);
  CHECK_THROWS_AS(ConvexGauge::square().with_declared_floor(2.5), Unsupported);
  CHECK_THROWS_AS(ConvexGauge::linear().with_declared_floor(-1.0), InvalidInput);
}

TEST_CASE("Taylor gap examples", "[gauge]") {
  CHECK(taylor_gap(ConvexGauge::square(), 1.3, 7.9) == 0.0);
  CHECK(taylor_gap(ConvexGauge::square(), 42.0, 2.0) == 0.0);
  CHECK(taylor_gap(ConvexGauge::linear(), 3.0, 11.0) == 0.0);
  CHECK(taylor_gap(ConvexGauge::flat(), 1.5, 2.5) > 0.0);
}

TEST_CASE("Taylor gap sweeps at the declared floor", "[gauge]") {
  for (const auto& g : {ConvexGauge::linear(), ConvexGauge::square(), ConvexGauge::power(2.0),
                        ConvexGauge::power(3.0), ConvexGauge::power(1.5)}) {
    const TaylorSweep s = taylor_sweep(g, 10000, 11);
    INFO(g.name() << " worst at (" << s.worst_s << ", " << s.worst_t << ")");
    CHECK(s.violations == 0);
    CHECK(s.min_gap >= -1e-12);
  }
}

TEST_CASE("the flat gauge is convex only near 1", "[gauge]") {
  // phi'' = (4/u^6 - 6/u^4) exp(-1/u^2), u = t - 1, changes sign at u = sqrt(2/3).
  const auto flat = ConvexGauge::flat();
  const double knee = 1.0 + std::sqrt(2.0 / 3.0);
  double prev = flat.right_derivative(1.0);
  for (int i = 1; i <= 200; ++i) {
    const double t = 1.0 + (knee - 1.0) * i / 200.0;
    const double d = flat.right_derivative(t);
    CHECK(d >= prev);
    prev = d;
  }
  CHECK(flat.right_derivative(knee + 1.0) < flat.right_derivative(knee));
  CHECK(flat.right_derivative(50.0) < flat.right_derivative(10.0));
  CHECK(taylor_sweep(flat, 10000, 11).violations > 0);
  CHECK_THAT(taylor_gap(flat, 10.0, 20.0), WithinAbs(-0.0176, 1e-3));
  CHECK_FALSE(flat.strictly_convex());
}

TEST_CASE("theta examples", "[gauge]") {
  const auto one = theta_check({1.0, 0.0});
  CHECK(one.theta == 0.0);
  CHECK(one.gap1 == 0.0);
  CHECK(one.gap2 == 0.0);

  const auto i = theta_check({0.0, 1.0});
  CHECK(i.theta == 0.5);
  CHECK(i.gap1 == 0.5);
  CHECK(i.gap2 == 0.0);

  const auto z = theta_check({3.0, 4.0});
  CHECK_THAT(z.theta, WithinRel(1.6, 1e-15));
  CHECK_THAT(z.gap1, WithinAbs(0.4, 1e-15));
  CHECK_THAT(z.gap2, WithinAbs(0.0, 1e-14));

  const auto zero = theta_check({0.0, 0.0});
  CHECK(zero.theta == 0.0);
}

TEST_CASE("theta sweep", "[gauge]") {
  const ThetaSweep s = theta_sweep(10000, 5);
  CHECK(s.right_half_samples > 4000);
  CHECK(s.min_gap1_right_half >= -1e-12);
  CHECK(s.min_gap1 >= -1e-12);
  CHECK(s.min_gap2 >= -1e-12);
}
