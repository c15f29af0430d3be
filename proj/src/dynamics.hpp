#pragma once

#include "geometry.hpp"
#include "schottky.hpp"

#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

namespace escapelab {

// K0: reduced points of the fundamental domain with x0 >= threshold
// (hyperbolic), or the Euclidean disk |m| <= radius.
struct CompactCore {
  ModelGeometry geometry = ModelGeometry::hyperbolic();
  double threshold = 0.0;  // x0 threshold; hyperbolic only
  double radius = 1.0;     // hyperbolic distance from the origin, or Euclidean radius

  static CompactCore hyperbolic_radius(double radius);
  static CompactCore euclidean(double radius);
  // Radius of the convex core inside the fundamental domain plus margin.
  static CompactCore for_group(const SchottkyGroup& grp, double margin = 0.5);

  // For reduced points.
  bool contains(const Vec2& q) const;
  // Area of K0 (hyperbolic or Euclidean).
  double area(const SchottkyGroup& grp) const;
  // mu_L(S*K0) = 2 pi area.
  double liouville_volume(const SchottkyGroup& grp) const { return 2.0 * std::numbers::pi * area(grp); }
};

// Largest distance from the origin of the geodesics joining depth-2 limit
// points, restricted to the fundamental domain.
double convex_core_radius(const SchottkyGroup& grp);

UnitPhasePoint quotient_flow(const CompactCore& core, const SchottkyGroup& grp, const UnitPhasePoint& z,
                             double t);

struct TrappedMeasureCurve {
  std::vector<double> times;
  std::vector<double> estimates;
  std::vector<double> stderrs;
  std::vector<std::int64_t> surviving;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
  double total_volume = 0.0;         // mu_L(S*K0)
  double reentry_fraction = 0.0;     // samples that left K0 and came back on the grid
};

struct MonteCarloOptions {
  std::int64_t n_samples = 100000;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: ESCAPELAB_THREADS or 1
};

// Times must be non-negative and increasing.
TrappedMeasureCurve trapped_measure_curve(const CompactCore& core, const SchottkyGroup& grp,
                                          const std::vector<double>& times, const MonteCarloOptions& mc);

std::pair<double, double> estimate_trapped_measure(const CompactCore& core, const SchottkyGroup& grp, double t,
                                                   std::int64_t n_samples, std::uint64_t seed, int threads = 0);

struct EscapeFit {
  double Q = 0.0;
  double stderr_ = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  int points_used = 0;
  double intercept = 0.0;
};

struct FitWindow {
  double t_min = 2.0;
  double t_max = 1e300;
  std::int64_t min_surviving = 50;
  double max_relative_error = 0.5;
};

EscapeFit estimate_escape_rate(const TrappedMeasureCurve& curve, const FitWindow& window = {});

double pressure_constant_curvature(double delta, int n);

struct LambdaEstimate {
  double value = 0.0;                // max over samples of log|dg^T| / T at the largest T
  std::vector<double> times;
  std::vector<double> slopes;        // same quantity at each grid time
  std::int64_t trapped = 0;          // samples in K0 at every grid time
};

// Sasaki operator norm of the differential of g^t at a frame, given the
// group element a = F_start^{-1} F_end in the frame's trivialisation.
double frame_differential_norm(const Mat2& a);
// Free Euclidean flow: |dg^t| = (t + sqrt(t^2 + 4)) / 2.
double euclidean_differential_norm(double t);

LambdaEstimate estimate_lambda_max(const CompactCore& core, const SchottkyGroup& grp,
                                   const std::vector<double>& t_grid, const MonteCarloOptions& mc);

// sup over a theta grid of h^(1-theta) mu(theta |log h| / Lambda), with the
// curve interpolated log-linearly.
double interpolated_remainder(double h, double Lambda, const std::vector<double>& times,
                              const std::vector<double>& measures, int theta_points = 101);
inline double interpolated_remainder(double h, double Lambda, const TrappedMeasureCurve& c, int theta_points = 101) {
  return interpolated_remainder(h, Lambda, c.times, c.estimates, theta_points);
}

double ehrenfest_time(double h, double Lambda0);
std::pair<double, double> remainder_exponents(double delta, int n);

struct LowerBoundCheck {
  std::vector<double> hs;
  std::vector<double> times;
  std::vector<double> measures;
  std::vector<double> stderrs;
  double c = 0.0;  // min over h of (measure - 3 sigma) / h^(n/2)
  bool holds = false;
};

LowerBoundCheck trapped_lower_bound(const CompactCore& core, const SchottkyGroup& grp, const std::vector<double>& hs,
                                    double Lambda0, const MonteCarloOptions& mc);

}  // namespace escapelab
