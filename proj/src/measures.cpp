#include "measures.hpp"

#include "errors.hpp"
#include "numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace escapelab {

namespace {

constexpr double kPi = std::numbers::pi;

double model_distance(const ModelGeometry& geom, const Vec2& m, const BallPoint& c) {
  if (geom.is_hyperbolic()) {
    if (!(m.squaredNorm() < 1.0)) return 1e300;
    return hyp_distance(BallPoint{m}, c);
  }
  return (m - c.q).norm();
}

double bump(double s) { return s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0; }

}  // namespace

// ------------------------------------------------------------ symbols

FiberProfile FiberProfile::gaussian(const Vec2& nu0, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("Gaussian fibre width must be positive");
  FiberProfile f;
  f.kind = Kind::Gaussian;
  f.nu0 = nu0;
  f.sigma = sigma;
  return f;
}

FiberProfile FiberProfile::bump(const Vec2& nu0, double radius) {
  if (!(radius > 0.0)) throw DomainError("bump radius must be positive");
  FiberProfile f;
  f.kind = Kind::Bump;
  f.nu0 = nu0;
  f.sigma = radius;
  return f;
}

FiberProfile FiberProfile::directional(double psi0, int power) {
  if (power < 0) throw DomainError("directional power must be non-negative");
  FiberProfile f;
  f.kind = Kind::Directional;
  f.psi0 = psi0;
  f.power = power;
  return f;
}

double FiberProfile::operator()(const Vec2& nu) const {
  switch (kind) {
    case Kind::Constant:
      return 1.0;
    case Kind::Gaussian: {
      double d2 = (nu - nu0).squaredNorm() / (sigma * sigma);
      return d2 <= 81.0 ? std::exp(-0.5 * d2) : 0.0;
    }
    case Kind::Directional: {
      double c = 0.5 * (1.0 + std::cos(std::atan2(nu.y(), nu.x()) - psi0));
      return std::pow(c, power);
    }
    case Kind::Bump:
      return ::escapelab::bump((nu - nu0).norm() / sigma);
  }
  return 0.0;
}

SymbolFunction make_symbol(const ModelGeometry& geom, const BallPoint& center, double radius,
                           const FiberProfile& fiber, BaseShape shape, double amplitude) {
  geom.validate();
  if (!(radius > 0.0)) throw DomainError("symbol support radius must be positive");
  if (geom.is_hyperbolic() && !(center.q.squaredNorm() < 1.0)) throw DomainError("symbol centre must be interior");
  SymbolFunction a;
  a.geometry = geom;
  a.center = center;
  a.radius = radius;
  a.sup_norm = std::abs(amplitude);
  a.fiber = std::make_shared<FiberProfile>(fiber);
  if (shape == BaseShape::Bump) {
    a.base = [geom, center, radius, amplitude](const Vec2& m) {
      return amplitude * bump(model_distance(geom, m, center) / radius);
    };
  } else {
    double w = radius / 9.0;
    a.base = [geom, center, radius, amplitude, w](const Vec2& m) {
      double d = model_distance(geom, m, center);
      return d < radius ? amplitude * std::exp(-0.5 * d * d / (w * w)) : 0.0;
    };
  }
  auto base = a.base;
  auto fib = a.fiber;
  a.evaluate = [base, fib](const Vec2& m, const Vec2& nu) {
    double b = base(m);
    return b == 0.0 ? 0.0 : b * (*fib)(nu);
  };
  return a;
}

SymbolFunction zero_symbol(const ModelGeometry& geom) {
  SymbolFunction a;
  a.geometry = geom;
  a.radius = 0.1;
  a.sup_norm = 0.0;
  a.evaluate = [](const Vec2&, const Vec2&) { return 0.0; };
  a.base = [](const Vec2&) { return 0.0; };
  a.fiber = std::make_shared<FiberProfile>();
  return a;
}

SymbolFunction linear_combination(double alpha, const SymbolFunction& a, double beta, const SymbolFunction& b) {
  SymbolFunction out;
  out.geometry = a.geometry;
  out.center = a.center;
  out.radius = std::max(a.radius, model_distance(a.geometry, b.center.q, a.center) + b.radius);
  out.sup_norm = std::abs(alpha) * a.sup_norm + std::abs(beta) * b.sup_norm;
  auto fa = a.evaluate, fb = b.evaluate;
  out.evaluate = [=](const Vec2& m, const Vec2& nu) { return alpha * fa(m, nu) + beta * fb(m, nu); };
  return out;
}

SymbolFunction flow_composed(const SymbolFunction& a, const SchottkyGroup& grp, double t) {
  if (t == 0.0) return a;
  SymbolFunction out = a;
  out.base = nullptr;
  out.fiber = nullptr;
  out.radius = a.radius + std::abs(t);
  ModelGeometry geom = a.geometry;
  BallPoint c = a.center;
  double reach = out.radius;
  auto fa = a.evaluate;
  SchottkyGroup g = grp;
  out.evaluate = [=](const Vec2& m, const Vec2& nu) {
    if (model_distance(geom, m, c) >= reach) return 0.0;
    if (!geom.is_hyperbolic()) {
      Vec2 dir = nu / nu.norm();
      return fa(m + t * dir, dir);
    }
    double scale = 2.0 / (1.0 - m.squaredNorm());
    UnitPhasePoint z{BallPoint{m}, scale * nu / nu.norm()};
    Frame f = Frame::from_phase(z).flowed(t);
    reduce_frame(g, f);
    UnitPhasePoint w = f.to_phase();
    return fa(w.m.q, w.nu);
  };
  return out;
}

void QuadratureSpec::validate() const {
  if (points < 4) throw ValidationError("quadrature needs at least 4 points per dimension");
  if (!(tolerance > 0.0)) throw ValidationError("quadrature tolerance must be positive");
  if (max_word_len < 0) throw ValidationError("word length must be non-negative");
}

EuclideanDisk support_disk(const SymbolFunction& a) {
  if (a.geometry.is_hyperbolic()) return hyperbolic_ball_in_disk(a.center, a.radius);
  return {a.center.q, a.radius};
}

namespace {

void require_support_in_domain(const SymbolFunction& a, const SchottkyGroup& grp) {
  if (!a.geometry.is_hyperbolic()) {
    if (grp.rank() != 0) throw ValidationError("Euclidean measures only support the trivial group");
    return;
  }
  EuclideanDisk s = support_disk(a);
  if (!(s.center.norm() + s.radius < 1.0)) throw DomainError("symbol support leaves the ball");
  for (Letter l : grp.alphabet()) {
    const EuclideanDisk& d = grp.disk(l);
    if (!((s.center - d.center).norm() > s.radius + d.radius)) {
      throw DomainError("symbol support must lie in the interior of the fundamental domain (meets disk " +
                        Word{{l}}.str() + ")");
    }
  }
}

struct Node {
  Vec2 m;
  double weight;
};

// Geodesic polar rule about the symbol centre: Gauss in the radius, trapezoid in angle.
std::vector<Node> polar_nodes(const SymbolFunction& a, int points) {
  const GaussRule& g = gauss_legendre(points);
  std::vector<Node> out;
  out.reserve(static_cast<std::size_t>(points) * points);
  const double r = a.radius;
  Isometry tc = a.geometry.is_hyperbolic() ? translation_to(a.center) : Isometry();
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    double rho = 0.5 * r * (g.nodes[i] + 1.0);
    double wr = 0.5 * r * g.weights[i] * (a.geometry.is_hyperbolic() ? std::sinh(rho) : rho);
    for (int j = 0; j < points; ++j) {
      double th = 2.0 * kPi * j / points;
      Vec2 m;
      if (a.geometry.is_hyperbolic()) {
        m = to_vec(tc.act(std::polar(std::tanh(0.5 * rho), th)));
      } else {
        m = a.center.q + rho * Vec2(std::cos(th), std::sin(th));
      }
      out.push_back({m, wr * 2.0 * kPi / points});
    }
  }
  return out;
}

// Geometric tail bound from the last two shells; throws when they do not decay.
double geometric_tail(const std::vector<double>& shells) {
  if (shells.size() < 3) return 0.0;
  double last = shells.back(), prev = shells[shells.size() - 2];
  if (last == 0.0) return 0.0;
  if (prev == 0.0) {
    throw PrecisionError("shell " + std::to_string(shells.size() - 1) + " of the group sum does not decay");
  }
  double q = last / prev;
  if (!(q < 1.0)) {
    throw PrecisionError("shell " + std::to_string(shells.size() - 1) + " of the group sum does not decay (ratio " +
                         std::to_string(q) + "); xi is too close to the limit set");
  }
  return last * q / (1.0 - q);
}

}  // namespace

BoundaryPoint reduce_boundary(const SchottkyGroup& grp, const BoundaryPoint& xi, Word* word) {
  cplx p = to_complex(xi.p);
  for (int step = 0; step < 10000; ++step) {
    Letter l = grp.containing_disk(to_vec(p));
    if (l == 0) return BoundaryPoint{to_vec(p / std::abs(p))};
    p = grp.letter(-l).act(p);
    p /= std::abs(p);
    if (word) word->letters.push_back(l);
  }
  throw PrecisionError("boundary point does not reduce; it is on or too close to the limit set");
}

double limit_set_clearance(const SchottkyGroup& grp, const BoundaryPoint& xi, int depth) {
  if (grp.rank() == 0) return 1e300;
  double best = 1e300;
  for (const auto& d : refined_disks(grp, depth)) best = std::min(best, (xi.p - d.center).norm() - d.radius);
  return best;
}

bool in_escape_chart(const ModelGeometry& geom, const SchottkyGroup& grp, const BoundaryPoint& xi, const Vec2& m) {
  if (geom.is_hyperbolic()) {
    double r2 = m.squaredNorm();
    if (!(r2 < 1.0)) return false;
    double rmin = (2.0 - geom.epsilon0) / (2.0 + geom.epsilon0);
    if (r2 < rmin * rmin) return false;
    if (!grp.in_domain(m)) return false;
    return m.dot(busemann_differential(xi, BallPoint{m})) >= 0.0;
  }
  double rmin = 1.0 / geom.epsilon0;
  return m.squaredNorm() >= rmin * rmin && m.dot(xi.p) >= 0.0;
}

// ------------------------------------------------------------ mu tilde

namespace {

double mu_tilde_density(const ModelGeometry& geom, const BoundaryPoint& xi, const SymbolFunction& a, const Vec2& m) {
  static const SchottkyGroup trivial = SchottkyGroup::trivial();
  if (!in_escape_chart(geom, trivial, xi, m)) return 0.0;
  if (geom.is_hyperbolic()) {
    BallPoint q{m};
    return std::exp(busemann(xi, q)) * a(m, busemann_differential(xi, q));
  }
  return a(m, xi.p);
}

}  // namespace

MeasureValue mu_tilde_integral(const ModelGeometry& geom, const BoundaryPoint& xi, const SymbolFunction& a,
                               const QuadratureSpec& quad) {
  quad.validate();
  MeasureValue out;
  double full = 0.0, half = 0.0;
  for (const auto& nd : polar_nodes(a, quad.points)) full += nd.weight * mu_tilde_density(geom, xi, a, nd.m);
  for (const auto& nd : polar_nodes(a, std::max(4, quad.points / 2)))
    half += nd.weight * mu_tilde_density(geom, xi, a, nd.m);
  out.value = full;
  out.error_bound = std::abs(full - half);
  return out;
}

std::pair<double, double> mu_tilde_monte_carlo(const ModelGeometry& geom, const BoundaryPoint& xi,
                                               const SymbolFunction& a, std::int64_t samples, std::uint64_t seed) {
  if (samples < 2) throw DomainError("Monte Carlo needs at least two samples");
  auto rng = make_stream(seed, 0x6d75ULL);
  const double r = a.radius;
  const bool hyp = geom.is_hyperbolic();
  const double volume = hyp ? 2.0 * kPi * (std::cosh(r) - 1.0) : kPi * r * r;
  Isometry tc = hyp ? translation_to(a.center) : Isometry();
  double sum = 0.0, sum2 = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    double u = uniform01(rng), th = 2.0 * kPi * uniform01(rng);
    Vec2 m;
    if (hyp) {
      double rho = std::acosh(1.0 + u * (std::cosh(r) - 1.0));
      m = to_vec(tc.act(std::polar(std::tanh(0.5 * rho), th)));
    } else {
      m = a.center.q + r * std::sqrt(u) * Vec2(std::cos(th), std::sin(th));
    }
    double v = mu_tilde_density(geom, xi, a, m);
    sum += v;
    sum2 += v * v;
  }
  double n = static_cast<double>(samples);
  double mean = sum / n, var = std::max(0.0, sum2 / n - mean * mean);
  return {volume * mean, volume * std::sqrt(var / (n - 1.0))};
}

// ------------------------------------------------------------ pushforward

namespace {

// Quadrature node in the horocyclic chart of xi: m = xi * Cayley(X + i e^S),
// where e^{phi_xi} Vol = dX dS and the flow toward xi is S -> S + t.
struct ChartNode {
  double X, S;
  double value;  // a(gamma^{-1} tau(m, xi)) * weight
  int shell;
};

Vec2 chart_point(const ModelGeometry& geom, const BoundaryPoint& xi, double X, double S) {
  if (!geom.is_hyperbolic()) {
    Vec2 perp(-xi.p.y(), xi.p.x());
    return X * perp + S * xi.p;
  }
  cplx w(X, std::exp(S));
  return to_vec(to_complex(xi.p) * (w - cplx(0.0, 1.0)) / (w + cplx(0.0, 1.0)));
}

std::vector<ChartNode> chart_nodes(const ModelGeometry& geom, const SchottkyGroup& grp, const BoundaryPoint& xi,
                                   const SymbolFunction& a, int points, int max_len) {
  const GaussRule& g = gauss_legendre(points);
  std::vector<ChartNode> out;
  const double r = a.radius;
  auto add_box = [&](double x0, double x1, double s0, double s1, int shell, const auto& value_at) {
    double hx = 0.5 * (x1 - x0), hs = 0.5 * (s1 - s0);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      double X = x0 + hx * (g.nodes[i] + 1.0);
      for (std::size_t j = 0; j < g.nodes.size(); ++j) {
        double S = s0 + hs * (g.nodes[j] + 1.0);
        double v = value_at(chart_point(geom, xi, X, S));
        if (v != 0.0) out.push_back({X, S, v * hx * hs * g.weights[i] * g.weights[j], shell});
      }
    }
  };
  if (!geom.is_hyperbolic()) {
    Vec2 perp(-xi.p.y(), xi.p.x());
    double xc = a.center.q.dot(perp), sc = a.center.q.dot(xi.p);
    add_box(xc - r, xc + r, sc - r, sc + r, 0, [&](const Vec2& m) { return a(m, xi.p); });
    return out;
  }
  cplx xic = to_complex(xi.p);
  visit_words(grp, max_len, [&](std::span<const Letter> w, const Isometry& gamma) {
    cplx z = std::conj(xic) * gamma.act(to_complex(a.center.q));
    cplx u = cplx(0.0, 1.0) * (1.0 + z) / (1.0 - z);
    double xc = u.real(), yc = u.imag();
    Isometry ginv = gamma.inverse();
    add_box(xc - yc * std::sinh(r), xc + yc * std::sinh(r), std::log(yc) - r, std::log(yc) + r,
            static_cast<int>(w.size()), [&](const Vec2& m) {
              if (!(m.squaredNorm() < 1.0)) return 0.0;
              UnitPhasePoint z0{BallPoint{m}, busemann_differential(xi, BallPoint{m})};
              UnitPhasePoint z1 = apply_isometry(ginv, z0);
              return a(z1);
            });
  });
  return out;
}

double chart_value(const ModelGeometry& geom, const SchottkyGroup& grp, const BoundaryPoint& xi,
                   const std::vector<ChartNode>& nodes, double t, bool* saturated) {
  double v = 0.0;
  bool all = true;
  for (const auto& nd : nodes) {
    if (in_escape_chart(geom, grp, xi, chart_point(geom, xi, nd.X, nd.S + t))) {
      v += nd.value;
    } else {
      all = false;
    }
  }
  if (saturated) *saturated = all;
  return v;
}

BoundaryPoint validated_xi(const ModelGeometry& geom, const SchottkyGroup& grp, const BoundaryPoint& xi) {
  BoundaryPoint p = BoundaryPoint::checked(xi.p);
  if (!geom.is_hyperbolic() || grp.rank() == 0) return p;
  double clearance = limit_set_clearance(grp, p, 6);
  if (!(clearance > 0.0)) {
    throw PrecisionError("xi lies in the depth-6 limit set cover (clearance " + std::to_string(clearance) + ")");
  }
  return reduce_boundary(grp, p);
}

}  // namespace

MeasureValue mu_xi_pushforward(const ModelGeometry& geom, const SchottkyGroup& grp, const BoundaryPoint& xi_in,
                               const SymbolFunction& a, double t_max, const QuadratureSpec& quad) {
  quad.validate();
  geom.validate();
  if (!(t_max > 0.0)) throw DomainError("t_max must be positive");
  require_support_in_domain(a, grp);
  BoundaryPoint xi = validated_xi(geom, grp, xi_in);
  const int len = geom.is_hyperbolic() ? quad.max_word_len : 0;
  auto nodes = chart_nodes(geom, grp, xi, a, quad.points, len);
  auto coarse = chart_nodes(geom, grp, xi, a, std::max(4, quad.points / 2), len);

  MeasureValue out;
  out.word_len_used = grp.rank() == 0 ? 0 : len;
  out.converged = false;
  const double dt = 0.5;
  int small = 0;
  double t = 0.0, last_increment = 0.0;
  bool saturated = false;
  for (int k = 0;; ++k) {
    t = dt * k;
    double v = chart_value(geom, grp, xi, nodes, t, &saturated);
    if (!out.sequence.empty()) {
      double prev = out.sequence.back();
      last_increment = v - prev;
      if (v < prev - 1e-12 * (1.0 + std::abs(prev))) out.monotone = false;
      if (std::abs(last_increment) < quad.tolerance * (1.0 + std::abs(v)) && v != 0.0) {
        ++small;
      } else {
        small = 0;
      }
    }
    out.times.push_back(t);
    out.sequence.push_back(v);
    if (saturated) {
      out.converged = true;
      last_increment = 0.0;
      break;
    }
    if (small >= 3) {
      out.converged = true;
      break;
    }
    if (t + dt > t_max + 1e-12) break;
  }
  out.value = out.sequence.back();
  out.t_used = t;
  double coarse_value = chart_value(geom, grp, xi, coarse, t, nullptr);

  std::vector<double> shells(out.word_len_used + 1, 0.0);
  for (const auto& nd : nodes) shells[nd.shell] += std::abs(nd.value);
  out.shell_sums = shells;
  double tail = grp.rank() == 0 ? 0.0 : geometric_tail(shells);
  out.error_bound = std::abs(out.value - coarse_value) + std::abs(last_increment) + tail;
  return out;
}

// ------------------------------------------------------------ group sum

MeasureValue mu_xi_group_sum(const SchottkyGroup& grp, const BoundaryPoint& xi_in, const SymbolFunction& a,
                             int max_word_len, const QuadratureSpec& quad) {
  quad.validate();
  if (!a.geometry.is_hyperbolic()) throw DomainError("the group-sum formula is hyperbolic only");
  if (max_word_len < 0) throw DomainError("word length must be non-negative");
  require_support_in_domain(a, grp);
  BoundaryPoint xi = validated_xi(a.geometry, grp, xi_in);
  auto fine = polar_nodes(a, quad.points);
  auto coarse = polar_nodes(a, std::max(4, quad.points / 2));
  // drop nodes where the base vanishes
  auto prune = [&](std::vector<Node>& nodes) {
    std::erase_if(nodes, [&](const Node& n) { return a(n.m, Vec2(1.0, 0.0)) == 0.0 && a(n.m, Vec2(0.0, 1.0)) == 0.0 &&
                                                     a(n.m, Vec2(-1.0, 0.0)) == 0.0; });
  };
  if (a.separable()) {
    std::erase_if(fine, [&](const Node& n) { return a.base(n.m) == 0.0; });
    std::erase_if(coarse, [&](const Node& n) { return a.base(n.m) == 0.0; });
  } else {
    prune(fine);
    prune(coarse);
  }

  const int len = grp.rank() == 0 ? 0 : max_word_len;
  std::vector<double> shells(len + 1, 0.0);
  double total = 0.0, total_coarse = 0.0;
  auto term = [&](const std::vector<Node>& nodes, const BoundaryPoint& p, double jac) {
    double s = 0.0;
    for (const auto& nd : nodes) {
      BallPoint q{nd.m};
      s += nd.weight * a(nd.m, busemann_differential(p, q)) * std::exp(busemann(p, q));
    }
    return s * jac;
  };
  visit_words(grp, len, [&](std::span<const Letter> w, const Isometry& gamma) {
    BoundaryPoint p = boundary_action(gamma, xi);
    double jac = boundary_derivative_norm(gamma, xi);
    double v = term(fine, p, jac);
    total += v;
    total_coarse += term(coarse, p, jac);
    shells[w.size()] += std::abs(v);
  });
  MeasureValue out;
  out.value = total;
  out.word_len_used = len;
  out.shell_sums = shells;
  double tail = grp.rank() == 0 ? 0.0 : geometric_tail(shells);
  out.error_bound = std::abs(total - total_coarse) + tail;
  return out;
}

// ------------------------------------------------------------ identities

InvarianceCheck check_invariance(const ModelGeometry& geom, const SchottkyGroup& grp, const BoundaryPoint& xi,
                                 const SymbolFunction& a, double t, double t_max, const QuadratureSpec& quad) {
  InvarianceCheck out;
  MeasureValue rhs = mu_xi_pushforward(geom, grp, xi, a, t_max, quad);
  if (t == 0.0) {
    out.lhs = out.rhs = rhs.value;
    out.bound = 2.0 * rhs.error_bound;
    return out;
  }
  MeasureValue lhs = mu_xi_pushforward(geom, grp, xi, flow_composed(a, grp, t), t_max + std::abs(t), quad);
  if (!lhs.converged || !rhs.converged) throw SignalError("pushforward did not converge for the invariance check");
  out.lhs = lhs.value;
  out.rhs = rhs.value;
  out.gap = std::abs(lhs.value - rhs.value);
  out.bound = lhs.error_bound + rhs.error_bound;
  return out;
}

std::vector<std::pair<double, double>> free_arcs(const SchottkyGroup& grp) {
  std::vector<std::pair<double, double>> covered;
  const double two_pi = 2.0 * kPi;
  for (Letter l : grp.alphabet()) {
    const EuclideanDisk& d = grp.disk(l);
    double dist = d.center.norm();
    double kappa = (1.0 + dist * dist - d.radius * d.radius) / (2.0 * dist);
    if (kappa >= 1.0) continue;
    if (kappa <= -1.0) return {};
    double half = std::acos(kappa), mid = std::atan2(d.center.y(), d.center.x());
    double lo = std::fmod(mid - half + 2.0 * two_pi, two_pi), hi = lo + 2.0 * half;
    if (hi > two_pi) {
      covered.emplace_back(lo, two_pi);
      covered.emplace_back(0.0, hi - two_pi);
    } else {
      covered.emplace_back(lo, hi);
    }
  }
  if (covered.empty()) return {{0.0, two_pi}};
  std::sort(covered.begin(), covered.end());
  std::vector<std::pair<double, double>> gaps;
  double cursor = 0.0;
  for (auto [lo, hi] : covered) {
    if (lo > cursor) gaps.emplace_back(cursor, lo);
    cursor = std::max(cursor, hi);
  }
  if (cursor < two_pi) gaps.emplace_back(cursor, two_pi);
  // join the arc that wraps through angle zero
  if (gaps.size() >= 2 && gaps.front().first == 0.0 && gaps.back().second == two_pi) {
    gaps.back().second = two_pi + gaps.front().second;
    gaps.erase(gaps.begin());
  }
  return gaps;
}

DisintegrationCheck check_disintegration(const ModelGeometry& geom, const SchottkyGroup& grp, const SymbolFunction& a,
                                         const std::function<double(const BoundaryPoint&)>& f,
                                         const QuadratureSpec& quad, const DisintegrationOptions& opts) {
  quad.validate();
  geom.validate();
  require_support_in_domain(a, grp);
  if (opts.boundary_points < 4) throw ValidationError("boundary quadrature needs at least 4 points");
  if (opts.mc_samples < 1000) throw ValidationError("disintegration needs at least 1000 Monte Carlo samples");
  DisintegrationCheck out;

  // left side: boundary quadrature of f(xi) mu_xi(a)
  auto mu = [&](const BoundaryPoint& xi, double* err) {
    MeasureValue v = geom.is_hyperbolic() ? mu_xi_group_sum(grp, xi, a, quad.max_word_len, quad)
                                          : mu_xi_pushforward(geom, grp, xi, a, opts.t_max, quad);
    if (err) *err = v.error_bound;
    return v.value;
  };
  auto boundary_integral = [&](int points, double* err_sum) {
    const GaussRule& g = gauss_legendre(points);
    double total = 0.0;
    for (auto [lo, hi] : free_arcs(grp)) {
      double half = 0.5 * (hi - lo);
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        BoundaryPoint xi = BoundaryPoint::from_angle(lo + half * (g.nodes[i] + 1.0));
        double fx = f(xi);
        if (fx == 0.0) continue;
        double err = 0.0;
        double w = half * g.weights[i];
        total += w * fx * mu(xi, err_sum ? &err : nullptr);
        if (err_sum) *err_sum += w * std::abs(fx) * err;
      }
    }
    return total;
  };
  double err_sum = 0.0;
  out.lhs = boundary_integral(opts.boundary_points, &err_sum);
  double coarse = boundary_integral(std::max(4, opts.boundary_points / 2), nullptr);
  out.quadrature_bound = err_sum + std::abs(out.lhs - coarse);

  // right side: Liouville Monte Carlo of f(xi_+infinity) a over S*supp(a)
  const double r = a.radius;
  const bool hyp = geom.is_hyperbolic();
  const double volume = 2.0 * kPi * (hyp ? 2.0 * kPi * (std::cosh(r) - 1.0) : kPi * r * r);
  Isometry tc = hyp ? translation_to(a.center) : Isometry();
  constexpr std::int64_t chunk = 1 << 14;
  const int chunks = static_cast<int>((opts.mc_samples + chunk - 1) / chunk);
  std::vector<double> sums(chunks, 0.0), sums2(chunks, 0.0);
  std::vector<std::int64_t> dropped(chunks, 0);
  const int horizon = static_cast<int>(std::ceil(opts.t_escape));
  parallel_chunks(chunks, resolve_threads(opts.threads), [&](int c) {
    auto rng = make_stream(opts.seed, static_cast<std::uint64_t>(c));
    std::int64_t begin = c * chunk, end = std::min<std::int64_t>(opts.mc_samples, begin + chunk);
    for (std::int64_t s = begin; s < end; ++s) {
      double u = uniform01(rng), th = 2.0 * kPi * uniform01(rng), psi = 2.0 * kPi * uniform01(rng);
      Vec2 m;
      if (hyp) {
        double rho = std::acosh(1.0 + u * (std::cosh(r) - 1.0));
        m = to_vec(tc.act(std::polar(std::tanh(0.5 * rho), th)));
      } else {
        m = a.center.q + r * std::sqrt(u) * Vec2(std::cos(th), std::sin(th));
      }
      UnitPhasePoint z = phase_point_from_direction(geom, BallPoint{m}, psi);
      double av = a(z);
      if (av == 0.0) continue;
      BoundaryPoint end_point;
      bool escaped = false;
      if (!hyp) {
        end_point = xi_plus_infinity(geom, z);
        escaped = true;
      } else {
        Frame fr = Frame::from_phase(z);
        for (int k = 0; k <= horizon; ++k) {
          reduce_frame(grp, fr);
          cplx e = fr.forward_endpoint();
          if (grp.containing_disk(to_vec(e)) == 0) {
            end_point = BoundaryPoint{to_vec(e)};
            escaped = true;
            break;
          }
          fr = fr.flowed(1.0);
        }
      }
      if (!escaped) {
        ++dropped[c];
        continue;
      }
      double v = av * f(end_point);
      sums[c] += v;
      sums2[c] += v * v;
    }
  });
  double sum = 0.0, sum2 = 0.0;
  std::int64_t drop = 0;
  for (int c = 0; c < chunks; ++c) {
    sum += sums[c];
    sum2 += sums2[c];
    drop += dropped[c];
  }
  double n = static_cast<double>(opts.mc_samples);
  double mean = sum / n, var = std::max(0.0, sum2 / n - mean * mean);
  out.rhs = volume * mean;
  out.sigma = volume * std::sqrt(var / (n - 1.0));
  out.dropped_fraction = static_cast<double>(drop) / n;
  out.gap = std::abs(out.lhs - out.rhs);
  return out;
}

}  // namespace escapelab
