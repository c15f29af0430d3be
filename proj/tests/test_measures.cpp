#include <doctest.h>

#include "errors.hpp"
#include "measures.hpp"

#include <cmath>
#include <numbers>

using namespace escapelab;

namespace {

constexpr double kPi = std::numbers::pi;

SymbolFunction probe_symbol(const ModelGeometry& geom) {
  return make_symbol(geom, BallPoint{Vec2(0.1, 0.3)}, 0.5, FiberProfile::directional(0.3, 2));
}

}  // namespace

TEST_CASE("fibre profiles") {
  CHECK(FiberProfile::constant()(Vec2(3.0, 1.0)) == 1.0);
  FiberProfile g = FiberProfile::gaussian(Vec2(1.0, 0.0), 0.5);
  CHECK(g(Vec2(1.0, 0.0)) == doctest::Approx(1.0));
  CHECK(g(Vec2(1.5, 0.0)) == doctest::Approx(std::exp(-0.5)));
  CHECK(g(Vec2(6.0, 0.0)) == 0.0);
  FiberProfile d = FiberProfile::directional(0.0, 1);
  CHECK(d(Vec2(1.0, 0.0)) == doctest::Approx(1.0));
  CHECK(d(Vec2(-1.0, 0.0)) == doctest::Approx(0.0));
  FiberProfile b = FiberProfile::bump(Vec2(0.0, 1.0), 0.5);
  CHECK(b(Vec2(0.0, 1.0)) == doctest::Approx(1.0));
  CHECK(b(Vec2(0.0, 1.6)) == 0.0);
}

TEST_CASE("symbols vanish outside their support ball") {
  ModelGeometry H = ModelGeometry::hyperbolic();
  SymbolFunction a = probe_symbol(H);
  CHECK(a(a.center.q, Vec2(std::cos(0.3), std::sin(0.3))) == doctest::Approx(1.0));
  EuclideanDisk d = support_disk(a);
  Vec2 outside = d.center + 1.01 * d.radius * Vec2(1.0, 0.0);
  CHECK(a(outside, Vec2(1.0, 0.0)) == 0.0);
  SymbolFunction z = linear_combination(1.0, a, -1.0, a);
  CHECK(z(a.center.q, Vec2(1.0, 0.0)) == 0.0);
}

TEST_CASE("mu tilde quadrature agrees with independent Monte Carlo") {
  ModelGeometry H = ModelGeometry::hyperbolic();
  SymbolFunction a = probe_symbol(H);
  BoundaryPoint xi = BoundaryPoint::from_angle(1.0);
  MeasureValue q = mu_tilde_integral(H, xi, a);
  auto [mc, se] = mu_tilde_monte_carlo(H, xi, a, 200000, 5);
  CHECK(std::abs(q.value - mc) <= 4.0 * se + q.error_bound);
}

TEST_CASE("group sum and pushforward agree on the trivial group") {
  ModelGeometry H = ModelGeometry::hyperbolic();
  SymbolFunction a = probe_symbol(H);
  for (double ang : {0.4, 2.0, 4.5}) {
    BoundaryPoint xi = BoundaryPoint::from_angle(ang);
    MeasureValue gs = mu_xi_group_sum(SchottkyGroup::trivial(), xi, a, 0);
    MeasureValue pf = mu_xi_pushforward(H, SchottkyGroup::trivial(), xi, a, 60.0);
    CHECK(pf.converged);
    CHECK(pf.monotone);
    CHECK(std::abs(gs.value - pf.value) <= 1e-6 * std::abs(gs.value));
  }
}

TEST_CASE("pushforward sequence is nondecreasing for a nonnegative symbol") {
  ModelGeometry H = ModelGeometry::hyperbolic();
  SymbolFunction a = probe_symbol(H);
  MeasureValue pf = mu_xi_pushforward(H, SchottkyGroup::cyclic(2.0), BoundaryPoint::from_angle(1.6), a, 60.0);
  REQUIRE(pf.sequence.size() >= 2);
  for (std::size_t i = 1; i < pf.sequence.size(); ++i) CHECK(pf.sequence[i] >= pf.sequence[i - 1]);
}

TEST_CASE("mu xi is invariant under the flow") {
  ModelGeometry H = ModelGeometry::hyperbolic();
  SymbolFunction a = probe_symbol(H);
  InvarianceCheck c = check_invariance(H, SchottkyGroup::trivial(), BoundaryPoint::from_angle(2.2), a, 0.7);
  CHECK(c.gap <= c.bound + 1e-8 * std::abs(c.lhs));
}

TEST_CASE("free arcs") {
  auto full = free_arcs(SchottkyGroup::trivial());
  REQUIRE(full.size() == 1);
  CHECK(full[0].second - full[0].first == doctest::Approx(2.0 * kPi));
  auto arcs = free_arcs(SchottkyGroup::cyclic(2.0));
  CHECK(arcs.size() == 2);
  double total = 0.0;
  for (auto [lo, hi] : arcs) total += hi - lo;
  CHECK(total < 2.0 * kPi);
}

TEST_CASE("boundary points are reduced into the domain closure") {
  SchottkyGroup g = SchottkyGroup::cyclic(2.0);
  Word w;
  BoundaryPoint r = reduce_boundary(g, BoundaryPoint::from_angle(0.1), &w);
  CHECK(g.in_domain(r.p * (1.0 - 1e-12)));
  CHECK(limit_set_clearance(g, BoundaryPoint::from_angle(kPi / 2.0)) > 0.0);
  CHECK(limit_set_clearance(g, BoundaryPoint::from_angle(0.0)) < 0.0);
}

TEST_CASE("invalid quadrature settings") {
  QuadratureSpec q;
  q.points = 0;
  CHECK_THROWS_AS(q.validate(), ValidationError);
}
