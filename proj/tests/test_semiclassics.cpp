#include <doctest.h>

#include "errors.hpp"
#include "semiclassics.hpp"

#include <cmath>
#include <numbers>

using namespace escapelab;

namespace {

constexpr double kPi = std::numbers::pi;

// Five-point finite-difference flat Laplacian of the plane wave at m.
cplx flat_laplacian(const PlaneWaveSpec& s, const Vec2& m, double e) {
  auto E = [&](const Vec2& p) { return evaluate_wave(s, BallPoint{p}); };
  Vec2 dx(e, 0.0), dy(0.0, e);
  return (E(m + dx) + E(m - dx) + E(m + dy) + E(m - dy) - 4.0 * E(m)) / (e * e);
}

SymbolFunction gaussian_symbol(const ModelGeometry& g, const BallPoint& c, double r) {
  return make_symbol(g, c, r, FiberProfile::gaussian(Vec2(2.0, 0.0), 2.0));
}

}  // namespace

TEST_CASE("plane waves are generalised eigenfunctions") {
  for (double h : {0.5, 0.25}) {
    PlaneWaveSpec hyp{ModelGeometry::hyperbolic(), BoundaryPoint::from_angle(0.7), 1.0, h};
    PlaneWaveSpec flat{ModelGeometry::euclidean(), BoundaryPoint::from_angle(0.7), 1.3, h};
    for (Vec2 m : {Vec2(0.1, 0.2), Vec2(-0.3, 0.05), Vec2(0.0, -0.5)}) {
      const double e = 1e-3;
      double w = 0.25 * std::pow(1.0 - m.squaredNorm(), 2);
      cplx E = evaluate_wave(hyp, BallPoint{m});
      // h^2 (Delta - 1/4) E = lambda^2 E with Delta = -(1-|q|^2)^2/4 grad^2.
      cplx residual = h * h * (-w * flat_laplacian(hyp, m, e) - 0.25 * E) - hyp.lambda * hyp.lambda * E;
      CHECK(std::abs(residual) <= 1e-4 * std::abs(E));
      cplx F = evaluate_wave(flat, BallPoint{m});
      cplx flat_res = -h * h * flat_laplacian(flat, m, e) - flat.lambda * flat.lambda * F;
      CHECK(std::abs(flat_res) <= 1e-4 * std::abs(F));
    }
  }
}

TEST_CASE("plane wave spec validation") {
  PlaneWaveSpec s;
  s.lambda = 3.0;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.lambda = 1.0;
  s.h = 0.7;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  CHECK_THROWS_AS(parse_quantization("anti-wick"), ValidationError);
  CHECK(parse_quantization("weyl") == Quantization::Weyl);
}

TEST_CASE("flat matrix element is the symbol integrated at lambda xi") {
  ModelGeometry E = ModelGeometry::euclidean();
  SymbolFunction a = gaussian_symbol(E, BallPoint{Vec2(0.2, -0.1)}, 1.0);
  QuadratureSpec q;
  q.points = 64;
  PlaneWaveSpec s{E, BoundaryPoint::from_angle(0.4), 1.2, 0.1};
  MatrixElement left = matrix_element(a, s, Quantization::Left, q);
  MatrixElement weyl = matrix_element(a, s, Quantization::Weyl, q);
  // Real symbol, self-adjoint Weyl quantisation.
  CHECK(std::abs(weyl.value.imag()) <= 1e-10 * std::abs(weyl.value));
  CHECK(std::abs(left.value - weyl.value) <= 1e-8 * std::abs(weyl.value));
}

TEST_CASE("too coarse a grid reports the required point count") {
  ModelGeometry H = ModelGeometry::hyperbolic();
  SymbolFunction a = gaussian_symbol(H, BallPoint{Vec2(0.0, 0.05)}, 0.3);
  QuadratureSpec q;
  q.points = 16;
  PlaneWaveSpec s{H, BoundaryPoint::from_angle(0.0), 1.0, 0.05};
  try {
    matrix_element(a, s, Quantization::Left, q);
    FAIL("expected a resolution error");
  } catch (const ResolutionError& e) {
    CHECK(e.required_points > 16);
    q.points = e.required_points;
    CHECK_NOTHROW(matrix_element(a, s, Quantization::Left, q));
  }
}

TEST_CASE("matrix elements need a gaussian fibre and a support inside the ball") {
  ModelGeometry H = ModelGeometry::hyperbolic();
  SymbolFunction d = make_symbol(H, BallPoint{}, 0.3, FiberProfile::directional(0.0));
  PlaneWaveSpec s{H, BoundaryPoint{}, 1.0, 0.1};
  CHECK_THROWS_AS(matrix_element(d, s, Quantization::Left), DomainError);
  SymbolFunction far = gaussian_symbol(H, BallPoint{Vec2(0.9, 0.0)}, 2.0);
  CHECK_THROWS_AS(matrix_element(far, s, Quantization::Left), DomainError);
}

TEST_CASE("weyl leading term scales as h^-2 and matches the free trace") {
  ModelGeometry E = ModelGeometry::euclidean();
  SymbolFunction a = make_symbol(E, BallPoint{Vec2(0.1, 0.2)}, 1.0, FiberProfile::bump(Vec2(0.3, 0.1), 0.5),
                                 BaseShape::Gaussian);
  QuadratureSpec q;
  q.points = 128;
  double v1 = weyl_leading_term(a, 1.0, 0.2, 1, Quantization::Left, q);
  double v2 = weyl_leading_term(a, 1.0, 0.1, 1, Quantization::Left, q);
  CHECK(std::abs(v2 / v1 - 4.0) <= 1e-12);
  CHECK(std::abs(v1 - free_trace_oracle(a, 1.0, 0.2, 1)) <= 1e-8 * v1);
  CHECK_THROWS_AS(weyl_leading_term(a, 1.0, 0.2, 2, Quantization::Left, q), DomainError);
}

TEST_CASE("hyperbolic leading term of a fibre-constant symbol is the cosphere area times the base integral") {
  ModelGeometry H = ModelGeometry::hyperbolic();
  SymbolFunction a = make_symbol(H, BallPoint{}, 0.5, FiberProfile::constant());
  QuadratureSpec q;
  q.points = 64;
  double h = 0.1, s = 1.0;
  double v = weyl_leading_term(a, s, h, 1, Quantization::Left, q);
  // Radial oracle: the covector disk at m has Euclidean area pi s (2/(1-r^2))^2.
  EuclideanDisk d = support_disk(a);
  double base = 0.0;
  const int N = 4000;
  for (int i = 0; i < N; ++i) {
    double r = (i + 0.5) * d.radius / N;
    double w = std::pow(2.0 / (1.0 - r * r), 2);
    base += a.base(Vec2(r, 0.0)) * w * kPi * s * 2.0 * kPi * r * d.radius / N;
  }
  CHECK(v * std::pow(2.0 * kPi * h, 2) == doctest::Approx(base).epsilon(1e-5));
}

TEST_CASE("convergence study checks its h list") {
  ModelGeometry H = ModelGeometry::hyperbolic();
  SymbolFunction a = gaussian_symbol(H, BallPoint{Vec2(0.0, 0.05)}, 0.3);
  QuadratureSpec q;
  q.points = 96;
  q.max_word_len = 0;
  CHECK_THROWS_AS(convergence_study(a, H, BoundaryPoint{}, {0.1, 0.05, 0.025}, Quantization::Left, q),
                  ValidationError);
  CHECK_THROWS_AS(convergence_study(a, H, BoundaryPoint{}, {0.1, 0.2, 0.05, 0.025}, Quantization::Left, q),
                  ValidationError);
}
