#pragma once

// Model geometries: the Poincare ball (n = 1, the hyperbolic plane with
// metric 4|dq|^2/(1-|q|^2)^2) and the flat plane. Phase points are covectors;
// on the ball the covector components are Euclidean coordinate components, so
// |nu|_g = (1-|q|^2)/2 * |nu|.

#include <Eigen/Dense>

#include <complex>

namespace escapelab {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using cplx = std::complex<double>;

enum class GeometryKind { HyperbolicBall, EuclideanPlane };

struct ModelGeometry {
  GeometryKind kind = GeometryKind::HyperbolicBall;
  int n = 1;               // boundary dimension; only n = 1 is implemented
  double epsilon0 = 1.0;   // threshold for the boundary defining function

  static ModelGeometry hyperbolic(double epsilon0 = 1.0);
  // Euclidean x = 1/|m| outside |m| <= R with R = 1, so epsilon0 = 1/(2R).
  static ModelGeometry euclidean(double epsilon0 = 0.5);

  bool is_hyperbolic() const { return kind == GeometryKind::HyperbolicBall; }
  void validate() const;
};

struct BallPoint {
  Vec2 q = Vec2::Zero();
};

struct BoundaryPoint {
  Vec2 p = Vec2(1.0, 0.0);

  static BoundaryPoint from_angle(double theta);
  // Throws DomainError unless | |p| - 1 | <= 1e-12.
  static BoundaryPoint checked(const Vec2& p);
  double angle() const;
};

struct UnitPhasePoint {
  BallPoint m;
  Vec2 nu = Vec2(1.0, 0.0);
};

inline cplx to_complex(const Vec2& v) { return {v.x(), v.y()}; }
inline Vec2 to_vec(cplx z) { return {z.real(), z.imag()}; }

// Cometric norm of nu at m for the given model.
double cometric_norm(const ModelGeometry& geom, const BallPoint& m, const Vec2& nu);

// Unit phase point at m pointing in Euclidean direction angle theta.
UnitPhasePoint phase_point_from_direction(const ModelGeometry& geom, const BallPoint& m,
                                          double theta);

// Throws DomainError unless |nu|_g = 1 within 1e-10.
void check_unit(const ModelGeometry& geom, const UnitPhasePoint& z);

// Orientation-preserving isometry of the hyperbolic plane, stored as a real
// unimodular matrix acting on the upper half plane. The ball action is the
// Cayley conjugate [[alpha, beta], [conj(beta), conj(alpha)]].
class Isometry {
 public:
  Isometry();
  // Throws InvalidIsometryError unless |det - 1| <= 1e-12.
  explicit Isometry(const Mat2& matrix);

  static Isometry identity() { return Isometry(); }
  // From the ball form; (alpha, beta) with |alpha|^2 - |beta|^2 = 1.
  static Isometry from_ball(cplx alpha, cplx beta);
  // Hyperbolic element with axis through the origin in direction angle, translation length.
  static Isometry translation(double length, double angle);

  const Mat2& matrix() const { return a_; }
  const Mat2& inverse_matrix() const { return inv_; }
  cplx alpha() const { return alpha_; }
  cplx beta() const { return beta_; }

  Isometry inverse() const;
  Isometry operator*(const Isometry& rhs) const;

  cplx act(cplx w) const { return (alpha_ * w + beta_) / (std::conj(beta_) * w + std::conj(alpha_)); }
  // |gamma'(w)| for the ball action (Euclidean conformal factor).
  double derivative_norm(cplx w) const {
    return 1.0 / std::norm(std::conj(beta_) * w + std::conj(alpha_));
  }
  cplx derivative(cplx w) const {
    cplx den = std::conj(beta_) * w + std::conj(alpha_);
    return 1.0 / (den * den);
  }
  double trace() const { return a_(0, 0) + a_(1, 1); }
  // Hyperbolic translation length 2 arccosh(|tr|/2); zero for elliptic.
  double translation_length() const;

 private:
  Isometry(const Mat2& a, bool);
  void sync_ball();

  Mat2 a_;
  Mat2 inv_;
  cplx alpha_{1.0, 0.0};
  cplx beta_{0.0, 0.0};
};

// Unit tangent frame on the hyperbolic plane as an element of SL(2,R). The
// base frame (identity) sits at the ball origin pointing toward p = (1, 0).
struct Frame {
  Mat2 a = Mat2::Identity();

  cplx alpha() const { return {0.5 * (a(0, 0) + a(1, 1)), 0.5 * (a(0, 1) - a(1, 0))}; }
  cplx beta() const { return {0.5 * (a(0, 0) - a(1, 1)), -0.5 * (a(0, 1) + a(1, 0))}; }
  cplx base() const { return beta() / std::conj(alpha()); }
  Vec2 base_vec() const { return to_vec(base()); }
  // Forward endpoint on the unit circle.
  cplx forward_endpoint() const;
  cplx backward_endpoint() const;

  // Right multiplication by diag(e^{t/2}, e^{-t/2}).
  Frame flowed(double t) const;
  // Left multiplication by an isometry (moves the frame).
  Frame moved(const Isometry& g) const { return Frame{g.matrix() * a}; }
  Frame moved_inverse(const Isometry& g) const { return Frame{g.inverse_matrix() * a}; }

  static Frame from_phase(const UnitPhasePoint& z);
  UnitPhasePoint to_phase() const;
};

// Busemann function phi_p(q) = log((1-|q|^2)/|q-p|^2) on the ball.
double busemann(const BoundaryPoint& p, const BallPoint& q);
// Differential d_q phi_p (Euclidean components), a unit covector.
Vec2 busemann_differential(const BoundaryPoint& p, const BallPoint& q);

double euclid_phase(const BoundaryPoint& xi, const BallPoint& m);

double hyp_distance(const BallPoint& a, const BallPoint& b);

// Boundary defining function 2(1-|q|)/(1+|q|) = 2 e^{-d(0,q)}.
double x0(const BallPoint& q);
// Hyperbolic radius corresponding to x0 = threshold.
double radius_for_x0(double threshold);

BallPoint apply_isometry(const Isometry& g, const BallPoint& q);
BoundaryPoint boundary_action(const Isometry& g, const BoundaryPoint& p);
double boundary_derivative_norm(const Isometry& g, const BoundaryPoint& p);
// Pushes the covector along with the base point.
UnitPhasePoint apply_isometry(const Isometry& g, const UnitPhasePoint& z);

// Exact unit-speed geodesic flow g^t.
UnitPhasePoint geodesic(const ModelGeometry& geom, const UnitPhasePoint& z, double t);

// Forward endpoint of the trajectory through z.
BoundaryPoint xi_plus_infinity(const ModelGeometry& geom, const UnitPhasePoint& z);

// (m, d phi_xi(m)): the phase point at m escaping directly toward xi.
UnitPhasePoint tau(const ModelGeometry& geom, const BallPoint& m, const BoundaryPoint& xi);

// Euclidean radius and center of the hyperbolic ball B(c, r) in the disk model.
struct EuclideanDisk {
  Vec2 center;
  double radius;
};
EuclideanDisk hyperbolic_ball_in_disk(const BallPoint& c, double r);

// Isometry taking the origin to c (a pure translation along the ray through c).
Isometry translation_to(const BallPoint& c);

}  // namespace escapelab
