#include "geometry.hpp"

#include "errors.hpp"

#include <cmath>
#include <string>

namespace escapelab {

ModelGeometry ModelGeometry::hyperbolic(double epsilon0) {
  ModelGeometry g{GeometryKind::HyperbolicBall, 1, epsilon0};
  g.validate();
  return g;
}

ModelGeometry ModelGeometry::euclidean(double epsilon0) {
  ModelGeometry g{GeometryKind::EuclideanPlane, 1, epsilon0};
  g.validate();
  return g;
}

void ModelGeometry::validate() const {
  if (n != 1) {
    throw ValidationError("model dimension n = " + std::to_string(n) +
                          " is not implemented (only n = 1)");
  }
  if (!(epsilon0 > 0.0)) throw ValidationError("epsilon0 must be positive");
  if (is_hyperbolic() && epsilon0 > 2.0) {
    throw ValidationError("epsilon0 must not exceed 2 (the maximum of x0) on the ball");
  }
}

BoundaryPoint BoundaryPoint::from_angle(double theta) {
  return BoundaryPoint{Vec2(std::cos(theta), std::sin(theta))};
}

BoundaryPoint BoundaryPoint::checked(const Vec2& p) {
  if (std::abs(p.norm() - 1.0) > 1e-12) throw DomainError("boundary point is not on the unit sphere");
  return BoundaryPoint{p};
}

double BoundaryPoint::angle() const { return std::atan2(p.y(), p.x()); }

double cometric_norm(const ModelGeometry& geom, const BallPoint& m, const Vec2& nu) {
  if (geom.is_hyperbolic()) return 0.5 * (1.0 - m.q.squaredNorm()) * nu.norm();
  return nu.norm();
}

UnitPhasePoint phase_point_from_direction(const ModelGeometry& geom, const BallPoint& m,
                                          double theta) {
  double scale = geom.is_hyperbolic() ? 2.0 / (1.0 - m.q.squaredNorm()) : 1.0;
  return UnitPhasePoint{m, scale * Vec2(std::cos(theta), std::sin(theta))};
}

void check_unit(const ModelGeometry& geom, const UnitPhasePoint& z) {
  double norm = cometric_norm(geom, z.m, z.nu);
  if (std::abs(norm - 1.0) > 1e-10) throw DomainError("covector is not on the unit cosphere");
}

// ---------------------------------------------------------------- Isometry

Isometry::Isometry() : a_(Mat2::Identity()), inv_(Mat2::Identity()) {}

Isometry::Isometry(const Mat2& matrix) : a_(matrix) {
  double det = a_.determinant();
  if (!std::isfinite(det) || std::abs(det - 1.0) > 1e-12) {
    throw InvalidIsometryError("isometry matrix must be unimodular (det = " + std::to_string(det) + ")");
  }
  sync_ball();
}

Isometry::Isometry(const Mat2& a, bool) : a_(a) { sync_ball(); }

void Isometry::sync_ball() {
  inv_ << a_(1, 1), -a_(0, 1), -a_(1, 0), a_(0, 0);
  alpha_ = cplx(0.5 * (a_(0, 0) + a_(1, 1)), 0.5 * (a_(0, 1) - a_(1, 0)));
  beta_ = cplx(0.5 * (a_(0, 0) - a_(1, 1)), -0.5 * (a_(0, 1) + a_(1, 0)));
}

Isometry Isometry::from_ball(cplx alpha, cplx beta) {
  double det = std::norm(alpha) - std::norm(beta);
  if (!(det > 0.0)) throw InvalidIsometryError("ball form must satisfy |alpha|^2 - |beta|^2 > 0");
  double s = 1.0 / std::sqrt(det);
  alpha *= s;
  beta *= s;
  Mat2 a;
  a << alpha.real() + beta.real(), alpha.imag() - beta.imag(),
      -alpha.imag() - beta.imag(), alpha.real() - beta.real();
  return Isometry(a, true);
}

Isometry Isometry::translation(double length, double angle) {
  return from_ball(cplx(std::cosh(0.5 * length), 0.0), std::sinh(0.5 * length) * std::polar(1.0, angle));
}

Isometry Isometry::inverse() const { return Isometry(inv_, true); }

Isometry Isometry::operator*(const Isometry& rhs) const { return Isometry(a_ * rhs.a_, true); }

double Isometry::translation_length() const {
  double t = std::abs(trace());
  return t > 2.0 ? 2.0 * std::acosh(0.5 * t) : 0.0;
}

// ------------------------------------------------------------------- Frame

cplx Frame::forward_endpoint() const {
  cplx al = alpha(), be = beta();
  cplx e = (al + be) / (std::conj(be) + std::conj(al));
  return e / std::abs(e);
}

cplx Frame::backward_endpoint() const {
  cplx al = alpha(), be = beta();
  cplx e = (be - al) / (std::conj(al) - std::conj(be));
  return e / std::abs(e);
}

Frame Frame::flowed(double t) const {
  double ep = std::exp(0.5 * t), em = std::exp(-0.5 * t);
  Frame f;
  f.a << a(0, 0) * ep, a(0, 1) * em, a(1, 0) * ep, a(1, 1) * em;
  return f;
}

Frame Frame::from_phase(const UnitPhasePoint& z) {
  cplx w = to_complex(z.m.q);
  cplx alpha = std::sqrt(0.5 * to_complex(z.nu));
  cplx beta = w * std::conj(alpha);
  return Frame{Isometry::from_ball(alpha, beta).matrix()};
}

UnitPhasePoint Frame::to_phase() const {
  cplx al = alpha();
  return UnitPhasePoint{BallPoint{to_vec(beta() / std::conj(al))}, to_vec(2.0 * al * al)};
}

// ------------------------------------------------------ scalar geometry

namespace {
void require_interior(const BallPoint& q) {
  if (!(q.q.squaredNorm() < 1.0)) throw DomainError("point is not in the open unit ball");
}
}  // namespace

double busemann(const BoundaryPoint& p, const BallPoint& q) {
  require_interior(q);
  return std::log((1.0 - q.q.squaredNorm()) / (q.q - p.p).squaredNorm());
}

Vec2 busemann_differential(const BoundaryPoint& p, const BallPoint& q) {
  require_interior(q);
  Vec2 d = q.q - p.p;
  return -2.0 * q.q / (1.0 - q.q.squaredNorm()) - 2.0 * d / d.squaredNorm();
}

double euclid_phase(const BoundaryPoint& xi, const BallPoint& m) { return m.q.dot(xi.p); }

double hyp_distance(const BallPoint& a, const BallPoint& b) {
  require_interior(a);
  require_interior(b);
  double num = (a.q - b.q).norm();
  double den = std::sqrt((1.0 - a.q.squaredNorm()) * (1.0 - b.q.squaredNorm()));
  return 2.0 * std::asinh(num / den);
}

double x0(const BallPoint& q) {
  double r = q.q.norm();
  return 2.0 * (1.0 - r) / (1.0 + r);
}

double radius_for_x0(double threshold) {
  if (!(threshold > 0.0 && threshold <= 2.0)) throw DomainError("x0 threshold must lie in (0, 2]");
  return std::log(2.0 / threshold);
}

BallPoint apply_isometry(const Isometry& g, const BallPoint& q) {
  return BallPoint{to_vec(g.act(to_complex(q.q)))};
}

BoundaryPoint boundary_action(const Isometry& g, const BoundaryPoint& p) {
  cplx w = g.act(to_complex(p.p));
  return BoundaryPoint{to_vec(w / std::abs(w))};
}

double boundary_derivative_norm(const Isometry& g, const BoundaryPoint& p) {
  return g.derivative_norm(to_complex(p.p));
}

UnitPhasePoint apply_isometry(const Isometry& g, const UnitPhasePoint& z) {
  cplx w = to_complex(z.m.q);
  double rho2 = 4.0 / std::pow(1.0 - std::norm(w), 2);
  cplx v = to_complex(z.nu) / rho2;
  cplx w2 = g.act(w);
  cplx v2 = g.derivative(w) * v;
  double rho2b = 4.0 / std::pow(1.0 - std::norm(w2), 2);
  return UnitPhasePoint{BallPoint{to_vec(w2)}, to_vec(rho2b * v2)};
}

UnitPhasePoint geodesic(const ModelGeometry& geom, const UnitPhasePoint& z, double t) {
  if (geom.is_hyperbolic()) return Frame::from_phase(z).flowed(t).to_phase();
  Vec2 dir = z.nu / z.nu.norm();
  return UnitPhasePoint{BallPoint{z.m.q + t * dir}, z.nu};
}

BoundaryPoint xi_plus_infinity(const ModelGeometry& geom, const UnitPhasePoint& z) {
  if (geom.is_hyperbolic()) return BoundaryPoint{to_vec(Frame::from_phase(z).forward_endpoint())};
  return BoundaryPoint{z.nu / z.nu.norm()};
}

UnitPhasePoint tau(const ModelGeometry& geom, const BallPoint& m, const BoundaryPoint& xi) {
  if (geom.is_hyperbolic()) return UnitPhasePoint{m, busemann_differential(xi, m)};
  return UnitPhasePoint{m, xi.p};
}

EuclideanDisk hyperbolic_ball_in_disk(const BallPoint& c, double r) {
  double s = c.q.norm();
  if (s == 0.0) return {Vec2::Zero(), std::tanh(0.5 * r)};
  Vec2 u = c.q / s;
  double dc = 2.0 * std::atanh(s);
  double s1 = std::tanh(0.5 * (dc - r));
  double s2 = std::tanh(0.5 * (dc + r));
  return {0.5 * (s1 + s2) * u, 0.5 * (s2 - s1)};
}

Isometry translation_to(const BallPoint& c) {
  require_interior(c);
  double al = 1.0 / std::sqrt(1.0 - c.q.squaredNorm());
  return Isometry::from_ball(cplx(al, 0.0), al * to_complex(c.q));
}

}  // namespace escapelab
