#include "semiclassics.hpp"

#include "errors.hpp"
#include "numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace escapelab {

namespace {

constexpr double kPi = std::numbers::pi;

cplx cis(double x) { return {std::cos(x), std::sin(x)}; }

struct DiskRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
};

// Gauss in the radius, trapezoid in the angle.
DiskRule disk_rule(const Vec2& c, double R, int points) {
  const GaussRule& g = gauss_legendre(points);
  DiskRule out;
  out.points.reserve(static_cast<std::size_t>(points) * points);
  out.weights.reserve(out.points.capacity());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    double r = 0.5 * R * (g.nodes[i] + 1.0);
    double w = 0.5 * R * g.weights[i] * r * 2.0 * kPi / points;
    for (int j = 0; j < points; ++j) {
      double th = 2.0 * kPi * j / points;
      out.points.push_back(c + r * Vec2(std::cos(th), std::sin(th)));
      out.weights.push_back(w);
    }
  }
  return out;
}

double phi(const Vec2& p, const Vec2& q) { return std::log((1.0 - q.squaredNorm()) / (q - p).squaredNorm()); }

const FiberProfile& gaussian_fiber(const SymbolFunction& a) {
  if (!a.separable() || a.fiber->kind != FiberProfile::Kind::Gaussian) {
    throw DomainError("matrix elements need a separable symbol with a Gaussian fibre");
  }
  return *a.fiber;
}

struct NestedSetup {
  EuclideanDisk support;
  double Y = 0.0;
  double shift = 0.0;  // 0 for left, 1/2 for Weyl
  int required = 0;
};

NestedSetup nested_setup(const SymbolFunction& a, const PlaneWaveSpec& spec, Quantization conv) {
  const FiberProfile& fib = gaussian_fiber(a);
  NestedSetup s;
  s.support = support_disk(a);
  s.Y = 9.0 / fib.sigma;
  s.shift = conv == Quantization::Weyl ? 0.5 : 0.0;
  double grad = 1.0;
  if (spec.geometry.is_hyperbolic()) {
    double reach = s.support.center.norm() + s.support.radius + spec.h * s.Y * std::max(s.shift, 1.0 - s.shift);
    if (!(reach < 1.0)) {
      throw DomainError("quadrature offsets leave the ball (reach " + std::to_string(reach) +
                        "); shrink the support, widen the fibre or lower h");
    }
    grad = 2.0 * reach / (1.0 - reach * reach) + 2.0 / (1.0 - reach);
  }
  double freq = spec.lambda * grad + fib.nu0.norm();
  s.required = static_cast<int>(std::ceil(6.0 * 2.0 * s.Y * freq / (2.0 * kPi)));
  return s;
}

cplx nested_integral(const SymbolFunction& a, const PlaneWaveSpec& spec, const NestedSetup& s, int m_points,
                     int y_points) {
  const FiberProfile& fib = *a.fiber;
  const double sig2 = fib.sigma * fib.sigma;
  DiskRule mr = disk_rule(s.support.center, s.support.radius, m_points);
  DiskRule yr = disk_rule(Vec2::Zero(), s.Y, y_points);
  std::vector<cplx> ghat(yr.points.size());
  for (std::size_t k = 0; k < yr.points.size(); ++k) {
    const Vec2& y = yr.points[k];
    ghat[k] = yr.weights[k] * 2.0 * kPi * sig2 * std::exp(-0.5 * sig2 * y.squaredNorm()) * cis(-y.dot(fib.nu0));
  }
  const double h = spec.h, lam = spec.lambda;
  const Vec2 p = spec.xi.p;
  cplx total = 0.0;
  if (!spec.geometry.is_hyperbolic()) {
    cplx inner = 0.0;
    for (std::size_t k = 0; k < yr.points.size(); ++k) inner += ghat[k] * cis(lam * p.dot(yr.points[k]));
    double base = 0.0;
    for (std::size_t i = 0; i < mr.points.size(); ++i) base += mr.weights[i] * a.base(mr.points[i]);
    total = base * inner;
  } else {
    for (std::size_t i = 0; i < mr.points.size(); ++i) {
      double b = a.base(mr.points[i]);
      if (b == 0.0) continue;
      const Vec2& m = mr.points[i];
      cplx inner = 0.0;
      for (std::size_t k = 0; k < yr.points.size(); ++k) {
        const Vec2& y = yr.points[k];
        Vec2 mm = m - s.shift * h * y;
        Vec2 mp = m + (1.0 - s.shift) * h * y;
        double fm = phi(p, mm), fp = phi(p, mp);
        double rho = 2.0 / (1.0 - mm.squaredNorm());
        inner += ghat[k] * (rho * rho * std::exp(0.5 * (fp + fm))) * cis(lam / h * (fp - fm));
      }
      total += mr.weights[i] * b * inner;
    }
  }
  return total / (4.0 * kPi * kPi);
}

// Integral of the fibre profile over the Euclidean disk |nu| <= R.
double fiber_disk_integral(const FiberProfile& fib, double R, int points) {
  DiskRule r = disk_rule(Vec2::Zero(), R, points);
  double sum = 0.0;
  for (std::size_t k = 0; k < r.points.size(); ++k) sum += r.weights[k] * fib(r.points[k]);
  return sum;
}

// Polar integral of f over the disk, adaptive in both variables.
double adaptive_disk(const std::function<double(const Vec2&)>& f, const Vec2& c, double R, double tol) {
  return adaptive_integrate(
      [&](double th) {
        Vec2 u(std::cos(th), std::sin(th));
        return adaptive_integrate([&](double r) { return r * f(c + r * u); }, 0.0, R, tol);
      },
      0.0, 2.0 * kPi, tol);
}

// Cartesian chords: x outer, y inner over the disk.
double chord_integral(const std::function<double(const Vec2&)>& f, const Vec2& c, double R, double tol) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  return GK::integrate(
      [&](double x) {
        double half = std::sqrt(std::max(0.0, R * R - x * x));
        if (half == 0.0) return 0.0;
        return GK::integrate([&](double y) { return f(c + Vec2(x, y)); }, -half, half, 12, tol);
      },
      -R, R, 12, tol);
}

double cosphere_radius(const ModelGeometry& geom, const Vec2& m, double s) {
  double r = std::sqrt(s);
  return geom.is_hyperbolic() ? r * 2.0 / (1.0 - m.squaredNorm()) : r;
}

}  // namespace

void PlaneWaveSpec::validate() const {
  geometry.validate();
  if (!(lambda >= 0.5 && lambda <= 2.0)) throw ValidationError("lambda must lie in [1/2, 2]");
  if (!(h > 0.0 && h <= 0.5)) throw ValidationError("h must lie in (0, 0.5]");
  if (std::abs(xi.p.norm() - 1.0) > 1e-12) throw DomainError("xi must lie on the unit circle");
}

std::string to_string(Quantization q) { return q == Quantization::Weyl ? "weyl" : "left"; }

Quantization parse_quantization(const std::string& s) {
  if (s == "left") return Quantization::Left;
  if (s == "weyl") return Quantization::Weyl;
  throw ValidationError("unknown quantization '" + s + "' (expected left or weyl)");
}

cplx evaluate_wave(const PlaneWaveSpec& spec, const BallPoint& m) {
  spec.validate();
  double k = spec.lambda / spec.h;
  if (!spec.geometry.is_hyperbolic()) return cis(k * m.q.dot(spec.xi.p));
  double f = busemann(spec.xi, m);
  return std::exp(0.5 * f) * cis(k * f);
}

MatrixElement matrix_element(const SymbolFunction& a, const PlaneWaveSpec& spec, Quantization conv,
                             const QuadratureSpec& quad) {
  spec.validate();
  quad.validate();
  if (a.geometry.kind != spec.geometry.kind) throw DomainError("symbol and plane wave live on different models");
  NestedSetup s = nested_setup(a, spec, conv);
  MatrixElement out;
  out.required_points = s.required;
  if (quad.points < s.required) {
    ResolutionError e("quadrature has " + std::to_string(quad.points) + " points per dimension; " +
                      std::to_string(s.required) + " are needed at h = " + std::to_string(spec.h));
    e.required_points = s.required;
    throw e;
  }
  out.m_points = quad.points;
  out.y_points = quad.points;
  out.value = nested_integral(a, spec, s, quad.points, quad.points);
  int coarse_m = std::max(4, 3 * quad.points / 4);
  int coarse_y = std::max(s.required, 3 * quad.points / 4);
  out.error_bound = std::abs(out.value - nested_integral(a, spec, s, coarse_m, coarse_y));
  return out;
}

double weyl_leading_term(const SymbolFunction& a, double s, double h, int n, Quantization,
                         const QuadratureSpec& quad) {
  quad.validate();
  if (n != 1) throw DomainError("only n = 1 is implemented");
  if (!(s > 0.0)) throw DomainError("energy cutoff s must be positive");
  if (!(h > 0.0 && h < 1.0)) throw DomainError("h must lie in (0, 1)");
  const ModelGeometry& geom = a.geometry;
  EuclideanDisk sup = support_disk(a);
  double integral = 0.0;
  if (quad.scheme == QuadratureSpec::Scheme::Adaptive) {
    if (!a.separable()) throw DomainError("adaptive trace quadrature needs a separable symbol");
    const FiberProfile& fib = *a.fiber;
    double tol = std::min(quad.tolerance, 1e-10);
    auto fiber_at = [&](double R) {
      return adaptive_disk([&](const Vec2& nu) { return fib(nu); }, Vec2::Zero(), R, tol);
    };
    if (geom.is_hyperbolic()) {
      integral = adaptive_disk(
          [&](const Vec2& m) {
            double b = a.base(m);
            return b == 0.0 ? 0.0 : b * fiber_at(cosphere_radius(geom, m, s));
          },
          sup.center, sup.radius, tol);
    } else {
      integral = adaptive_disk([&](const Vec2& m) { return a.base(m); }, sup.center, sup.radius, tol) *
                 fiber_at(std::sqrt(s));
    }
  } else {
    DiskRule mr = disk_rule(sup.center, sup.radius, quad.points);
    if (a.separable() && !geom.is_hyperbolic()) {
      double base = 0.0;
      for (std::size_t i = 0; i < mr.points.size(); ++i) base += mr.weights[i] * a.base(mr.points[i]);
      integral = base * fiber_disk_integral(*a.fiber, std::sqrt(s), quad.points);
    } else {
      for (std::size_t i = 0; i < mr.points.size(); ++i) {
        const Vec2& m = mr.points[i];
        DiskRule nr = disk_rule(Vec2::Zero(), cosphere_radius(geom, m, s), quad.points);
        double inner = 0.0;
        for (std::size_t k = 0; k < nr.points.size(); ++k) inner += nr.weights[k] * a(m, nr.points[k]);
        integral += mr.weights[i] * inner;
      }
    }
  }
  double scale = 2.0 * kPi * h;
  return integral / (scale * scale);
}

double free_trace_oracle(const SymbolFunction& a, double s, double h, int n, double rel_tol) {
  if (n != 1) throw DomainError("only n = 1 is implemented");
  if (!(s > 0.0)) throw DomainError("energy cutoff s must be positive");
  if (!(h > 0.0 && h < 1.0)) throw DomainError("h must lie in (0, 1)");
  if (a.geometry.is_hyperbolic()) throw DomainError("the free trace oracle is flat space only");
  if (!a.separable()) throw DomainError("the free trace oracle needs a separable symbol");
  EuclideanDisk sup = support_disk(a);
  const FiberProfile& fib = *a.fiber;
  double base = chord_integral([&](const Vec2& m) { return a.base(m); }, sup.center, sup.radius, rel_tol);
  double fiber = chord_integral([&](const Vec2& nu) { return fib(nu); }, Vec2::Zero(), std::sqrt(s), rel_tol);
  double scale = 2.0 * kPi * h;
  return base * fiber / (scale * scale);
}

ConvergenceStudy convergence_study(const SymbolFunction& a, const ModelGeometry& geom, const BoundaryPoint& xi,
                                   const std::vector<double>& h_list, Quantization conv,
                                   const QuadratureSpec& quad) {
  if (h_list.size() < 4) throw ValidationError("a convergence study needs at least 4 values of h");
  for (std::size_t i = 1; i < h_list.size(); ++i) {
    if (!(h_list[i] < h_list[i - 1])) throw ValidationError("h values must be strictly decreasing");
  }
  SchottkyGroup trivial = SchottkyGroup::trivial();
  MeasureValue mu = geom.is_hyperbolic() ? mu_xi_group_sum(trivial, xi, a, 0, quad)
                                         : mu_xi_pushforward(geom, trivial, xi, a, 40.0, quad);
  ConvergenceStudy out;
  std::vector<double> lx, ly;
  bool exact = true;
  for (double h : h_list) {
    PlaneWaveSpec spec{geom, xi, 1.0, h};
    MatrixElement me = matrix_element(a, spec, conv, quad);
    ConvergenceRow row{h, me.value, mu.value, std::abs(me.value - mu.value), me.error_bound + mu.error_bound};
    if (row.abs_error > quad.tolerance * std::max(1.0, std::abs(mu.value))) exact = false;
    out.rows.push_back(row);
    lx.push_back(std::log(h));
    ly.push_back(std::log(std::max(row.abs_error, 1e-300)));
  }
  out.exact = exact;
  if (exact) {
    out.fitted_order = std::numeric_limits<double>::infinity();
  } else {
    LineFit fit = line_fit(lx, ly);
    out.fitted_order = fit.slope;
    out.order_stderr = fit.slope_stderr;
  }
  return out;
}

}  // namespace escapelab
