#pragma once

#include "dynamics.hpp"
#include "geometry.hpp"
#include "schottky.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace escapelab {

// Profile of a symbol in the fibre variable nu (Euclidean components).
struct FiberProfile {
  enum class Kind { Constant, Gaussian, Directional, Bump };
  Kind kind = Kind::Constant;
  Vec2 nu0 = Vec2::Zero();  // Gaussian centre
  double sigma = 1.0;       // Gaussian width (truncated at 9 sigma) or bump radius
  double psi0 = 0.0;        // Directional: ((1 + cos(arg nu - psi0)) / 2)^power
  int power = 1;

  static FiberProfile constant() { return {}; }
  static FiberProfile gaussian(const Vec2& nu0, double sigma);
  static FiberProfile directional(double psi0, int power = 1);
  static FiberProfile bump(const Vec2& nu0, double radius);
  double operator()(const Vec2& nu) const;
};

enum class BaseShape { Bump, Gaussian };

// Compactly supported observable a(m, nu). Support is the ball B(center, radius)
// in the model's own distance (hyperbolic on the ball, Euclidean on the plane).
struct SymbolFunction {
  ModelGeometry geometry = ModelGeometry::hyperbolic();
  std::function<double(const Vec2& m, const Vec2& nu)> evaluate;
  BallPoint center;
  double radius = 0.0;
  double sup_norm = 1.0;
  int smoothness = -1;  // -1: C-infinity

  // Separable structure base(m) * fiber(nu), when present.
  std::function<double(const Vec2& m)> base;
  std::shared_ptr<FiberProfile> fiber;

  double operator()(const UnitPhasePoint& z) const { return evaluate(z.m.q, z.nu); }
  double operator()(const Vec2& m, const Vec2& nu) const { return evaluate(m, nu); }
  bool separable() const { return static_cast<bool>(base) && static_cast<bool>(fiber); }
};

// Smooth bump exp(1 - 1/(1 - s^2)), s = dist(m, center)/radius, times the
// fibre profile. Gaussian bases use exp(-dist^2 / (2 w^2)) cut at 9 w, w = radius/9.
SymbolFunction make_symbol(const ModelGeometry& geom, const BallPoint& center, double radius,
                           const FiberProfile& fiber, BaseShape shape = BaseShape::Bump, double amplitude = 1.0);
SymbolFunction zero_symbol(const ModelGeometry& geom);
SymbolFunction linear_combination(double alpha, const SymbolFunction& a, double beta, const SymbolFunction& b);
// a o g^t on the quotient; support grows to radius + |t|.
SymbolFunction flow_composed(const SymbolFunction& a, const SchottkyGroup& grp, double t);

struct QuadratureSpec {
  enum class Scheme { TensorGauss, Adaptive };
  Scheme scheme = Scheme::TensorGauss;
  int points = 48;             // per dimension
  double tolerance = 1e-8;
  int max_word_len = 12;

  void validate() const;
};

struct MeasureValue {
  double value = 0.0;
  double error_bound = 0.0;
  double t_used = 0.0;
  int word_len_used = 0;
  bool converged = true;
  bool monotone = true;
  std::vector<double> times;      // pushforward t grid
  std::vector<double> sequence;   // pushforward values along the grid
  std::vector<double> shell_sums; // group-sum shell contributions
};

// Hyperbolic ball centre and radius of the symbol support as a Euclidean disk.
EuclideanDisk support_disk(const SymbolFunction& a);

// Reduces a boundary point into the closure of the fundamental domain.
BoundaryPoint reduce_boundary(const SchottkyGroup& grp, const BoundaryPoint& xi, Word* word = nullptr);
// Smallest gap between xi and the depth-d refined disks (negative inside).
double limit_set_clearance(const SchottkyGroup& grp, const BoundaryPoint& xi, int depth = 6);

// Directly escaping chart U: x <= epsilon0 with x non-increasing along tau.
bool in_escape_chart(const ModelGeometry& geom, const SchottkyGroup& grp, const BoundaryPoint& xi, const Vec2& m);

MeasureValue mu_tilde_integral(const ModelGeometry& geom, const BoundaryPoint& xi, const SymbolFunction& a,
                               const QuadratureSpec& quad = {});
// Independent Monte Carlo integration of the same density over the support ball.
std::pair<double, double> mu_tilde_monte_carlo(const ModelGeometry& geom, const BoundaryPoint& xi,
                                               const SymbolFunction& a, std::int64_t samples, std::uint64_t seed);

MeasureValue mu_xi_pushforward(const ModelGeometry& geom, const SchottkyGroup& grp, const BoundaryPoint& xi,
                               const SymbolFunction& a, double t_max, const QuadratureSpec& quad = {});

MeasureValue mu_xi_group_sum(const SchottkyGroup& grp, const BoundaryPoint& xi, const SymbolFunction& a,
                             int max_word_len, const QuadratureSpec& quad = {});

struct InvarianceCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  double bound = 0.0;  // combined error bounds
};

InvarianceCheck check_invariance(const ModelGeometry& geom, const SchottkyGroup& grp, const BoundaryPoint& xi,
                                 const SymbolFunction& a, double t, double t_max = 40.0,
                                 const QuadratureSpec& quad = {});

struct DisintegrationCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  double sigma = 0.0;            // Monte Carlo standard error of rhs
  double quadrature_bound = 0.0; // error bound of lhs
  double dropped_fraction = 0.0; // samples not escaped by the horizon
};

struct DisintegrationOptions {
  int boundary_points = 32;      // Gauss nodes per free arc
  std::int64_t mc_samples = 200000;
  std::uint64_t seed = 0;
  double t_escape = 30.0;
  double t_max = 40.0;           // pushforward horizon (Euclidean)
  int threads = 0;
};

// Free arcs of the unit circle (outside every Schottky disk), as angle intervals.
std::vector<std::pair<double, double>> free_arcs(const SchottkyGroup& grp);

DisintegrationCheck check_disintegration(const ModelGeometry& geom, const SchottkyGroup& grp, const SymbolFunction& a,
                                         const std::function<double(const BoundaryPoint&)>& f,
                                         const QuadratureSpec& quad, const DisintegrationOptions& opts);

}  // namespace escapelab
