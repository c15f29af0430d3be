#include <doctest.h>

#include "dynamics.hpp"
#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace escapelab;

TEST_CASE("quotient flow on the trivial group is the free flow") {
  ModelGeometry H = ModelGeometry::hyperbolic();
  CompactCore core = CompactCore::hyperbolic_radius(3.0);
  SchottkyGroup triv = SchottkyGroup::trivial();
  UnitPhasePoint z = phase_point_from_direction(H, BallPoint{Vec2(0.1, 0.2)}, 0.4);
  UnitPhasePoint a = quotient_flow(core, triv, z, 1.7);
  UnitPhasePoint b = geodesic(H, z, 1.7);
  CHECK((a.m.q - b.m.q).norm() < 1e-10);
}

TEST_CASE("quotient flow stays in the fundamental domain") {
  SchottkyGroup g = SchottkyGroup::cyclic(2.0);
  CompactCore core = CompactCore::hyperbolic_radius(1.5);
  ModelGeometry H = ModelGeometry::hyperbolic();
  UnitPhasePoint z = phase_point_from_direction(H, BallPoint{Vec2(0.0, 0.0)}, 0.0);
  for (double t : {1.0, 5.0, 20.0}) {
    UnitPhasePoint w = quotient_flow(core, g, z, t);
    CHECK(g.in_domain(w.m.q));
  }
  // The closed geodesic along the axis stays at the origin of the quotient modulo the period.
  UnitPhasePoint p = quotient_flow(core, g, z, 2.0);
  CHECK(p.m.q.norm() < 1e-9);
}

TEST_CASE("trapped measure curve is deterministic in seed and thread count") {
  SchottkyGroup g = SchottkyGroup::cyclic(2.0);
  CompactCore core = CompactCore::hyperbolic_radius(1.5);
  MonteCarloOptions mc;
  mc.n_samples = 20000;
  mc.seed = 9;
  mc.threads = 1;
  std::vector<double> ts{0.0, 1.0, 2.0, 3.0};
  TrappedMeasureCurve a = trapped_measure_curve(core, g, ts, mc);
  mc.threads = 3;
  TrappedMeasureCurve b = trapped_measure_curve(core, g, ts, mc);
  CHECK(a.estimates == b.estimates);
  CHECK(a.surviving == b.surviving);
  CHECK(a.estimates.front() == doctest::Approx(a.total_volume));
  for (std::size_t i = 1; i < ts.size(); ++i) CHECK(a.estimates[i] <= a.estimates[i - 1]);
  mc.seed = 10;
  TrappedMeasureCurve c = trapped_measure_curve(core, g, ts, mc);
  CHECK(c.estimates != a.estimates);
}

TEST_CASE("escape rate fit recovers a synthetic exponent") {
  TrappedMeasureCurve c;
  for (int i = 0; i <= 20; ++i) {
    double t = 0.5 * i;
    c.times.push_back(t);
    c.estimates.push_back(3.0 * std::exp(-0.7 * t));
    c.stderrs.push_back(0.01 * c.estimates.back());
    c.surviving.push_back(100000);
  }
  c.n_samples = 100000;
  EscapeFit f = estimate_escape_rate(c, FitWindow{2.0, 8.0, 50, 0.5});
  CHECK(f.Q == doctest::Approx(-0.7).epsilon(1e-10));
  CHECK(f.t_min >= 2.0);
  CHECK(f.t_max <= 8.0);
  CHECK_THROWS_AS(estimate_escape_rate(c, FitWindow{20.0, 30.0, 50, 0.5}), SignalError);
}

TEST_CASE("pressure in constant curvature is delta - n") {
  CHECK(pressure_constant_curvature(0.3, 1) == doctest::Approx(-0.7));
  CHECK_THROWS_AS(pressure_constant_curvature(1.0, 1), DomainError);
  auto [lo, hi] = remainder_exponents(0.4, 1);
  CHECK(lo < hi);
}

TEST_CASE("differential norms") {
  CHECK(euclidean_differential_norm(0.0) == doctest::Approx(1.0));
  CHECK(euclidean_differential_norm(3.0) == doctest::Approx((3.0 + std::sqrt(13.0)) / 2.0));
  Mat2 a;
  a << std::exp(1.0), 0.0, 0.0, std::exp(-1.0);
  CHECK(frame_differential_norm(a) == doctest::Approx(std::exp(2.0)).epsilon(1e-10));
}

TEST_CASE("interpolated remainder of an exponential curve") {
  std::vector<double> ts, ms;
  for (int i = 0; i <= 80; ++i) {
    ts.push_back(0.25 * i);
    ms.push_back(2.0 * std::exp(-0.5 * ts.back()));
  }
  const double h = 0.05, L = 1.0;
  double expected = std::max(h * 2.0, 2.0 * std::pow(h, 0.5 / L));
  CHECK(interpolated_remainder(h, L, ts, ms) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(ehrenfest_time(h, 1.0) == doctest::Approx(-std::log(h) / 2.0));
  CHECK_THROWS_AS(interpolated_remainder(1e-9, 0.1, ts, ms), DomainError);
}

TEST_CASE("compact core checks") {
  CHECK_THROWS_AS(CompactCore::hyperbolic_radius(-1.0), ValidationError);
  SchottkyGroup g = SchottkyGroup::symmetric(2, 2.5);
  CompactCore c = CompactCore::for_group(g);
  CHECK(c.radius > convex_core_radius(g));
  CHECK(c.liouville_volume(g) == doctest::Approx(2.0 * std::numbers::pi * c.area(g)));
}
