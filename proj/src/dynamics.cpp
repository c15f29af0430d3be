#include "dynamics.hpp"

#include "errors.hpp"
#include "numerics.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace escapelab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::int64_t kChunk = 1 << 15;

void require_group_matches(const CompactCore& core, const SchottkyGroup& grp) {
  if (!core.geometry.is_hyperbolic() && grp.rank() != 0) {
    throw ValidationError("Euclidean cores only support the trivial group");
  }
}

// cosh of the hyperbolic radius of a point at Euclidean radius s
double cosh_rho(double s) { return (1.0 + s * s) / (1.0 - s * s); }

}  // namespace

// ------------------------------------------------------------ CompactCore

CompactCore CompactCore::hyperbolic_radius(double radius) {
  if (!(radius > 0.0)) throw ValidationError("core radius must be positive");
  CompactCore c;
  c.geometry = ModelGeometry::hyperbolic();
  c.radius = radius;
  c.threshold = 2.0 * std::exp(-radius);
  return c;
}

CompactCore CompactCore::euclidean(double radius) {
  if (!(radius > 0.0)) throw ValidationError("core radius must be positive");
  CompactCore c;
  c.geometry = ModelGeometry::euclidean(0.5 / radius);
  c.radius = radius;
  return c;
}

CompactCore CompactCore::for_group(const SchottkyGroup& grp, double margin) {
  return hyperbolic_radius(convex_core_radius(grp) + margin);
}

bool CompactCore::contains(const Vec2& q) const {
  if (geometry.is_hyperbolic()) {
    double s = std::tanh(0.5 * radius);
    return q.squaredNorm() <= s * s;
  }
  return q.squaredNorm() <= radius * radius;
}

double CompactCore::area(const SchottkyGroup& grp) const {
  require_group_matches(*this, grp);
  if (!geometry.is_hyperbolic()) return kPi * radius * radius;
  const double smax = std::tanh(0.5 * radius);
  std::vector<EuclideanDisk> disks;
  for (Letter l : grp.alphabet()) disks.push_back(grp.disk(l));

  // radial integral of sinh(rho) over the part of the ray outside all disks
  auto ray = [&](double th) {
    Vec2 u(std::cos(th), std::sin(th));
    std::vector<std::pair<double, double>> cut;
    for (const auto& d : disks) {
      double b = u.dot(d.center), c = d.center.squaredNorm() - d.radius * d.radius;
      double disc = b * b - c;
      if (disc <= 0.0) continue;
      double s1 = std::max(0.0, b - std::sqrt(disc)), s2 = std::min(smax, b + std::sqrt(disc));
      if (s2 > s1) cut.emplace_back(s1, s2);
    }
    double value = cosh_rho(smax) - 1.0;
    for (auto [a, b] : cut) value -= cosh_rho(b) - cosh_rho(a);
    return value;
  };

  std::vector<double> breaks{0.0, 2.0 * kPi};
  auto add_break = [&](double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    breaks.push_back(a);
  };
  for (const auto& d : disks) {
    double dist = d.center.norm(), arg = std::atan2(d.center.y(), d.center.x());
    if (dist > d.radius) {
      double half = std::asin(d.radius / dist);
      add_break(arg - half);
      add_break(arg + half);
    }
    double cosv = (smax * smax + dist * dist - d.radius * d.radius) / (2.0 * smax * dist);
    if (std::abs(cosv) <= 1.0) {
      add_break(arg - std::acos(cosv));
      add_break(arg + std::acos(cosv));
    }
  }
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] - breaks[i] < 1e-14) continue;
    total += adaptive_integrate(ray, breaks[i], breaks[i + 1], 1e-12);
  }
  return total;
}

double convex_core_radius(const SchottkyGroup& grp) {
  if (grp.rank() == 0) return 0.0;
  auto pts = limit_set_sample(grp, 2);
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double a = pts[i].angle(), b = pts[j].angle();
      double mid = 0.5 * (a + b), half = 0.5 * std::abs(b - a);
      if (half > 0.5 * kPi) {
        mid += kPi;
        half = kPi - half;
      }
      // closest point to the origin of the geodesic with endpoints mid +- half
      double r = std::tan(0.25 * kPi - 0.5 * half);
      Vec2 u(std::cos(mid), std::sin(mid));
      Frame f = Frame::from_phase(phase_point_from_direction(ModelGeometry::hyperbolic(), BallPoint{r * u},
                                                             mid + 0.5 * kPi));
      for (int k = -2400; k <= 2400; ++k) {
        Vec2 q = f.flowed(0.005 * k).base_vec();
        if (!grp.in_domain(q)) continue;
        best = std::max(best, 2.0 * std::atanh(std::min(q.norm(), 1.0 - 1e-16)));
      }
    }
  }
  return best;
}

UnitPhasePoint quotient_flow(const CompactCore& core, const SchottkyGroup& grp, const UnitPhasePoint& z, double t) {
  require_group_matches(core, grp);
  if (!core.geometry.is_hyperbolic()) return geodesic(core.geometry, z, t);
  if (!grp.in_domain(z.m.q)) throw DomainError("quotient flow needs a base point in the fundamental domain");
  Frame f = Frame::from_phase(z).flowed(t);
  reduce_frame(grp, f);
  return f.to_phase();
}

// ------------------------------------------------------------ sampling

namespace {

struct CoreSampler {
  const CompactCore& core;
  const SchottkyGroup& grp;
  double cosh_r;

  CoreSampler(const CompactCore& c, const SchottkyGroup& g)
      : core(c), grp(g), cosh_r(std::cosh(c.radius)) {}

  // Base point in K0 (uniform area) and a uniform direction angle.
  std::pair<Vec2, double> draw(std::mt19937_64& rng) const {
    for (int attempt = 0; attempt < 100000; ++attempt) {
      double th = 2.0 * kPi * uniform01(rng);
      double u = uniform01(rng);
      double psi = 2.0 * kPi * uniform01(rng);
      Vec2 dir(std::cos(th), std::sin(th));
      if (!core.geometry.is_hyperbolic()) return {core.radius * std::sqrt(u) * dir, psi};
      double rho = std::acosh(1.0 + u * (cosh_r - 1.0));
      Vec2 q = std::tanh(0.5 * rho) * dir;
      if (grp.in_domain(q)) return {q, psi};
    }
    throw ValidationError("rejection sampler for the compact core failed");
  }
};

void check_efficiency(const CompactCore& core, const SchottkyGroup& grp, double area) {
  if (!core.geometry.is_hyperbolic()) return;
  double disk_area = 2.0 * kPi * (std::cosh(core.radius) - 1.0);
  if (area / disk_area < 0.01) {
    throw ValidationError("compact core of radius " + std::to_string(core.radius) +
                          " has rejection efficiency below 1% for this group");
  }
  (void)grp;
}

}  // namespace

TrappedMeasureCurve trapped_measure_curve(const CompactCore& core, const SchottkyGroup& grp,
                                          const std::vector<double>& times, const MonteCarloOptions& mc) {
  require_group_matches(core, grp);
  if (times.empty()) throw DomainError("time grid is empty");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0 || (i > 0 && !(times[i] > times[i - 1]))) {
      throw DomainError("time grid must be non-negative and increasing");
    }
  }
  if (mc.n_samples < 1000) throw DomainError("trapped-measure estimates need at least 1000 samples");

  TrappedMeasureCurve out;
  out.times = times;
  out.n_samples = mc.n_samples;
  out.seed = mc.seed;
  out.total_volume = core.liouville_volume(grp);
  check_efficiency(core, grp, out.total_volume / (2.0 * kPi));

  const std::size_t nt = times.size();
  const int chunks = static_cast<int>((mc.n_samples + kChunk - 1) / kChunk);
  std::vector<std::vector<std::int64_t>> alive(chunks, std::vector<std::int64_t>(nt, 0));
  std::vector<std::int64_t> reentries(chunks, 0);
  CoreSampler sampler(core, grp);

  parallel_chunks(chunks, resolve_threads(mc.threads), [&](int chunk) {
    auto rng = make_stream(mc.seed, static_cast<std::uint64_t>(chunk));
    std::int64_t begin = chunk * kChunk, end = std::min<std::int64_t>(mc.n_samples, begin + kChunk);
    auto& counts = alive[chunk];
    for (std::int64_t s = begin; s < end; ++s) {
      auto [q, psi] = sampler.draw(rng);
      bool left = false, reentered = false;
      double prev = 0.0;
      if (core.geometry.is_hyperbolic()) {
        Frame f = Frame::from_phase(phase_point_from_direction(core.geometry, BallPoint{q}, psi));
        for (std::size_t i = 0; i < nt; ++i) {
          if (times[i] > prev) {
            f = f.flowed(times[i] - prev);
            reduce_frame(grp, f);
            prev = times[i];
          }
          bool in = core.contains(f.base_vec());
          if (in) {
            ++counts[i];
            if (left) reentered = true;
          } else {
            left = true;
          }
        }
      } else {
        Vec2 dir(std::cos(psi), std::sin(psi));
        for (std::size_t i = 0; i < nt; ++i) {
          bool in = core.contains(q + times[i] * dir);
          if (in) {
            ++counts[i];
            if (left) reentered = true;
          } else {
            left = true;
          }
        }
      }
      if (reentered) ++reentries[chunk];
    }
  });

  std::int64_t reentered = 0;
  for (int c = 0; c < chunks; ++c) reentered += reentries[c];
  out.reentry_fraction = static_cast<double>(reentered) / static_cast<double>(mc.n_samples);
  const double n = static_cast<double>(mc.n_samples);
  for (std::size_t i = 0; i < nt; ++i) {
    std::int64_t k = 0;
    for (int c = 0; c < chunks; ++c) k += alive[c][i];
    double p = static_cast<double>(k) / n;
    out.surviving.push_back(k);
    out.estimates.push_back(p * out.total_volume);
    out.stderrs.push_back(out.total_volume * std::sqrt(p * (1.0 - p) / n));
  }
  return out;
}

std::pair<double, double> estimate_trapped_measure(const CompactCore& core, const SchottkyGroup& grp, double t,
                                                   std::int64_t n_samples, std::uint64_t seed, int threads) {
  auto curve = trapped_measure_curve(core, grp, {t}, {n_samples, seed, threads});
  return {curve.estimates[0], curve.stderrs[0]};
}

// ------------------------------------------------------------ escape rate

EscapeFit estimate_escape_rate(const TrappedMeasureCurve& curve, const FitWindow& window) {
  std::vector<double> ts, ys, sig;
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    double t = curve.times[i], est = curve.estimates[i], se = curve.stderrs[i];
    if (t < window.t_min || t > window.t_max) continue;
    if (!(est > 0.0)) continue;
    if (i < curve.surviving.size() && curve.surviving[i] < window.min_surviving) continue;
    if (se / est > window.max_relative_error) continue;
    ts.push_back(t);
    ys.push_back(std::log(est));
    sig.push_back(std::max(se / est, 1e-12));
  }
  if (ts.size() < 4) {
    throw SignalError("fewer than 4 usable points in the fit window (" + std::to_string(ts.size()) +
                      "); increase the sample count or reduce the largest time");
  }
  LineFit fit = weighted_line_fit(ts, ys, sig);
  EscapeFit out;
  out.Q = fit.slope;
  out.stderr_ = fit.slope_stderr;
  out.intercept = fit.intercept;
  out.t_min = ts.front();
  out.t_max = ts.back();
  out.points_used = static_cast<int>(ts.size());
  return out;
}

double pressure_constant_curvature(double delta, int n) {
  if (n < 1) throw DomainError("dimension must be at least 1");
  if (!(delta >= 0.0 && delta < n)) throw DomainError("delta must lie in [0, n)");
  return delta - n;
}

// ------------------------------------------------------------ Lambda_max

double frame_differential_norm(const Mat2& a) {
  // orthonormal basis of sl(2,R) for <X,Y> = 2 tr(X^T Y): flow, two transverse
  Mat2 e[3];
  e[0] << 0.5, 0.0, 0.0, -0.5;
  e[1] << 0.0, 0.5, 0.5, 0.0;
  e[2] << 0.0, 0.5, -0.5, 0.0;
  Mat2 ainv;
  ainv << a(1, 1), -a(0, 1), -a(1, 0), a(0, 0);
  ainv /= a.determinant();
  Eigen::Matrix3d ad;
  for (int j = 0; j < 3; ++j) {
    Mat2 img = ainv * e[j] * a;
    for (int i = 0; i < 3; ++i) ad(i, j) = 2.0 * (e[i].transpose() * img).trace();
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(ad);
  return svd.singularValues()(0);
}

double euclidean_differential_norm(double t) {
  // (position along, position across, direction angle)
  Eigen::Matrix3d d;
  d << 1.0, 0.0, 0.0, 0.0, 1.0, t, 0.0, 0.0, 1.0;
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(d);
  return svd.singularValues()(0);
}

LambdaEstimate estimate_lambda_max(const CompactCore& core, const SchottkyGroup& grp,
                                   const std::vector<double>& t_grid, const MonteCarloOptions& mc) {
  require_group_matches(core, grp);
  if (t_grid.empty()) throw DomainError("time grid is empty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || (i > 0 && !(t_grid[i] > t_grid[i - 1]))) {
      throw DomainError("Lambda_max time grid must be positive and increasing");
    }
  }
  check_efficiency(core, grp, core.area(grp));
  const std::size_t nt = t_grid.size();
  const int chunks = static_cast<int>((mc.n_samples + kChunk - 1) / kChunk);
  std::vector<std::vector<double>> best(chunks, std::vector<double>(nt, -1e300));
  std::vector<std::int64_t> trapped(chunks, 0);
  CoreSampler sampler(core, grp);

  parallel_chunks(chunks, resolve_threads(mc.threads), [&](int chunk) {
    auto rng = make_stream(mc.seed, static_cast<std::uint64_t>(chunk));
    std::int64_t begin = chunk * kChunk, end = std::min<std::int64_t>(mc.n_samples, begin + kChunk);
    std::vector<double> slopes(nt);
    for (std::int64_t s = begin; s < end; ++s) {
      auto [q, psi] = sampler.draw(rng);
      bool inside = true;
      double prev = 0.0;
      if (core.geometry.is_hyperbolic()) {
        Frame start = Frame::from_phase(phase_point_from_direction(core.geometry, BallPoint{q}, psi));
        Frame f = start;
        Word word;
        for (std::size_t i = 0; i < nt && inside; ++i) {
          f = f.flowed(t_grid[i] - prev);
          prev = t_grid[i];
          reduce_frame(grp, f, &word);
          inside = core.contains(f.base_vec());
          // f = word^{-1} start a, so a = start^{-1} word f
          Mat2 a = start.a.inverse() * grp.matrix(word).matrix() * f.a;
          slopes[i] = std::log(frame_differential_norm(a)) / t_grid[i];
        }
      } else {
        Vec2 dir(std::cos(psi), std::sin(psi));
        for (std::size_t i = 0; i < nt && inside; ++i) {
          inside = core.contains(q + t_grid[i] * dir);
          slopes[i] = std::log(euclidean_differential_norm(t_grid[i])) / t_grid[i];
        }
      }
      if (!inside) continue;
      ++trapped[chunk];
      for (std::size_t i = 0; i < nt; ++i) best[chunk][i] = std::max(best[chunk][i], slopes[i]);
    }
  });

  LambdaEstimate out;
  out.times = t_grid;
  out.slopes.assign(nt, -1e300);
  for (int c = 0; c < chunks; ++c) {
    out.trapped += trapped[c];
    for (std::size_t i = 0; i < nt; ++i) out.slopes[i] = std::max(out.slopes[i], best[c][i]);
  }
  if (out.trapped == 0) {
    throw SignalError("no sample stayed in the core up to t = " + std::to_string(t_grid.back()) +
                      "; increase the sample count or reduce the largest time");
  }
  out.value = out.slopes.back();
  return out;
}

// ------------------------------------------------------------ remainders

double interpolated_remainder(double h, double Lambda, const std::vector<double>& times,
                              const std::vector<double>& measures, int theta_points) {
  if (!(h > 0.0 && h < 1.0)) throw DomainError("h must lie in (0, 1)");
  if (!(Lambda > 0.0)) throw DomainError("Lambda must be positive");
  if (times.size() != measures.size() || times.empty()) throw DomainError("curve is empty or malformed");
  if (theta_points < 2) throw DomainError("theta grid needs at least two points");
  const double T = std::abs(std::log(h)) / Lambda;
  if (times.front() > 0.0 || T > times.back() * (1.0 + 1e-12)) {
    throw DomainError("curve covers [" + std::to_string(times.front()) + ", " + std::to_string(times.back()) +
                      "] but [0, " + std::to_string(T) + "] is needed; refusing to extrapolate");
  }
  auto mu = [&](double t) {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.end()) return measures.back();
    std::size_t j = static_cast<std::size_t>(it - times.begin());
    if (j == 0) return measures.front();
    double t0 = times[j - 1], t1 = times[j], m0 = measures[j - 1], m1 = measures[j];
    double w = (t - t0) / (t1 - t0);
    if (m0 > 0.0 && m1 > 0.0) return std::exp((1.0 - w) * std::log(m0) + w * std::log(m1));
    return (1.0 - w) * m0 + w * m1;
  };
  double best = 0.0;
  for (int k = 0; k < theta_points; ++k) {
    double theta = static_cast<double>(k) / (theta_points - 1);
    best = std::max(best, std::pow(h, 1.0 - theta) * mu(std::min(theta * T, times.back())));
  }
  return best;
}

double ehrenfest_time(double h, double Lambda0) {
  if (!(h > 0.0 && h < 1.0)) throw DomainError("h must lie in (0, 1)");
  if (!(Lambda0 > 0.0)) throw DomainError("Lambda0 must be positive");
  return std::log(1.0 / h) / (2.0 * Lambda0);
}

std::pair<double, double> remainder_exponents(double delta, int n) {
  if (!(delta >= 0.0 && delta < n)) throw DomainError("delta must lie in [0, n)");
  return {0.5 * (n - delta), n - delta};
}

LowerBoundCheck trapped_lower_bound(const CompactCore& core, const SchottkyGroup& grp, const std::vector<double>& hs,
                                    double Lambda0, const MonteCarloOptions& mc) {
  LowerBoundCheck out;
  out.hs = hs;
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < hs.size(); ++i) order.emplace_back(ehrenfest_time(hs[i], Lambda0), i);
  std::sort(order.begin(), order.end());
  std::vector<double> times;
  for (auto& [t, i] : order) times.push_back(t);
  auto curve = trapped_measure_curve(core, grp, times, mc);
  out.times.assign(hs.size(), 0.0);
  out.measures.assign(hs.size(), 0.0);
  out.stderrs.assign(hs.size(), 0.0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    std::size_t i = order[k].second;
    out.times[i] = curve.times[k];
    out.measures[i] = curve.estimates[k];
    out.stderrs[i] = curve.stderrs[k];
  }
  const double half_n = 0.5 * core.geometry.n;
  out.c = 1e300;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    out.c = std::min(out.c, (out.measures[i] - 3.0 * out.stderrs[i]) / std::pow(hs[i], half_n));
  }
  out.holds = out.c > 0.0;
  return out;
}

}  // namespace escapelab
