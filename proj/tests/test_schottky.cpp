#include <doctest.h>

#include "errors.hpp"
#include "schottky.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace escapelab;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("symmetric groups place the disks at coth and 1/sinh of half the length") {
  for (double ell : {1.5, 2.0, 3.0}) {
    SchottkyGroup g = SchottkyGroup::cyclic(ell);
    REQUIRE(g.rank() == 1);
    CHECK(g.plus_disks()[0].center.x() == doctest::Approx(1.0 / std::tanh(ell / 2.0)).epsilon(1e-12));
    CHECK(g.plus_disks()[0].radius == doctest::Approx(1.0 / std::sinh(ell / 2.0)).epsilon(1e-12));
    CHECK(g.minus_disks()[0].center.x() == doctest::Approx(-1.0 / std::tanh(ell / 2.0)).epsilon(1e-12));
    CHECK(g.generators()[0].translation_length() == doctest::Approx(ell).epsilon(1e-12));
  }
}

TEST_CASE("each generator maps the minus circle onto the plus circle") {
  SchottkyGroup g = SchottkyGroup::symmetric(2, 2.5);
  for (int k = 0; k < g.rank(); ++k) {
    const EuclideanDisk& dm = g.minus_disks()[k];
    const EuclideanDisk& dp = g.plus_disks()[k];
    for (int j = 0; j < 24; ++j) {
      double a = 2.0 * kPi * j / 24.0;
      cplx w = to_complex(dm.center + dm.radius * Vec2(std::cos(a), std::sin(a)));
      cplx img = g.generators()[k].act(w);
      CHECK(std::abs(std::abs(img - to_complex(dp.center)) - dp.radius) < 1e-10);
    }
  }
}

TEST_CASE("overlapping disks are rejected") {
  CHECK_THROWS_AS(SchottkyGroup::symmetric(2, 0.8), ValidationError);
  CHECK_NOTHROW(SchottkyGroup::symmetric(2, 2.5));
}

TEST_CASE("reduced word counts follow 1 + 2g((2g-1)^L - 1)/(2g-2)") {
  CHECK(word_count(1, 5) == 11u);
  CHECK(word_count(2, 0) == 1u);
  CHECK(word_count(2, 1) == 5u);
  CHECK(word_count(2, 4) == 1u + 4u + 12u + 36u + 108u);
  CHECK(word_count(3, 3) == 1u + 6u + 30u + 150u);
  WordEnumeration e = enumerate_words(SchottkyGroup::symmetric(2, 2.5), 4);
  CHECK(e.words.size() == word_count(2, 4));
  CHECK(e.words.front().word.empty());
  for (const WordEntry& w : e.words) CHECK(w.word.is_reduced());
  WordEnumeration cut = enumerate_words(SchottkyGroup::symmetric(2, 2.5), 10, 1000);
  CHECK(cut.truncated);
  CHECK(cut.complete_length == complete_length_within(2, 10, 1000));
  CHECK(word_count(2, cut.complete_length) <= 1000u);
}

TEST_CASE("word algebra") {
  Word a{{1, 2, -1}};
  CHECK(concat_reduced(a, inverse(a)).empty());
  CHECK(concat_reduced(Word{{1, 2}}, Word{{-2, 1}}) == Word{{1, 1}});
  CHECK_FALSE(Word{{1, -1}}.is_reduced());
  SchottkyGroup g = SchottkyGroup::symmetric(2, 2.5);
  Mat2 m = g.matrix(a).matrix() * g.matrix(inverse(a)).matrix();
  CHECK((m - Mat2::Identity()).norm() < 1e-10);
}

TEST_CASE("reduction lands in the fundamental domain and records the word") {
  SchottkyGroup g = SchottkyGroup::symmetric(2, 2.5);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    double r = 0.999 * std::sqrt(u(rng)), a = 2.0 * kPi * u(rng);
    BallPoint q{Vec2(r * std::cos(a), r * std::sin(a))};
    Reduction red = reduce_to_domain(g, q);
    CHECK(g.in_domain(red.point.q));
    BallPoint back = apply_isometry(g.matrix(red.word), red.point);
    CHECK((back.q - q.q).norm() < 1e-9);
  }
}

TEST_CASE("critical exponent of elementary groups") {
  DeltaEstimate triv = estimate_delta(SchottkyGroup::trivial(), DeltaMethod::SeriesBisection);
  CHECK(triv.delta == 0.0);
  SchottkyGroup cyc = SchottkyGroup::cyclic(2.0);
  for (DeltaMethod m : {DeltaMethod::SeriesBisection, DeltaMethod::OrbitCountSlope}) {
    DeltaEstimate d = estimate_delta(cyc, m);
    CHECK(d.delta >= 0.0);
    CHECK(d.delta <= 0.02);
  }
}

TEST_CASE("two estimators agree on a two-generator group and sit in (0, 1)") {
  SchottkyGroup g = SchottkyGroup::symmetric(2, 2.5);
  DeltaBudget b;
  b.orbit_budget = 1'000'000;
  DeltaEstimate s = estimate_delta(g, DeltaMethod::SeriesBisection, b);
  DeltaEstimate o = estimate_delta(g, DeltaMethod::OrbitCountSlope, b);
  CHECK(s.delta > 0.0);
  CHECK(s.delta < 1.0);
  CHECK(std::abs(s.delta - o.delta) <= 3.0 * (s.stderr_ + o.stderr_) + 0.05);
}

TEST_CASE("limit set samples stay inside the disks and have a box dimension near delta") {
  SchottkyGroup g = SchottkyGroup::symmetric(2, 2.5);
  std::vector<BoundaryPoint> pts = limit_set_sample(g, 7);
  CHECK(pts.size() > 100);
  for (const BoundaryPoint& p : pts) {
    CHECK(std::abs(p.p.norm() - 1.0) < 1e-9);
    CHECK_FALSE(g.in_domain(p.p * (1.0 - 1e-9)));
  }
  double box = box_counting_dimension(pts, 1e-4, 1e-1);
  DeltaEstimate d = estimate_delta(g, DeltaMethod::SeriesBisection);
  CHECK(std::abs(box - d.delta) < 0.2);
}
