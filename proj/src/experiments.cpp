#include "experiments.hpp"

#include "dynamics.hpp"
#include "errors.hpp"
#include "groupfile.hpp"
#include "numerics.hpp"
#include "semiclassics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <type_traits>
#include <variant>

namespace escapelab {

namespace {

using Runner = std::function<void(const ExperimentConfig&, const RunOptions&, RunRecord&)>;

Vec2 pair_of(const ExperimentConfig& cfg, const std::string& key) {
  std::vector<double> v = cfg.reals(key);
  if (v.size() != 2) throw ValidationError(key + " needs exactly two numbers");
  return {v[0], v[1]};
}

MonteCarloOptions mc_options(const ExperimentConfig& cfg, const RunOptions& opts) {
  MonteCarloOptions mc;
  mc.n_samples = cfg.integer("dynamics.samples");
  mc.seed = cfg.unsigned_integer("dynamics.seed");
  mc.threads = opts.threads;
  return mc;
}

CompactCore core_from_config(const ExperimentConfig& cfg, const ModelGeometry& geom, const SchottkyGroup& grp) {
  if (!geom.is_hyperbolic()) {
    return CompactCore::euclidean(cfg.is_auto("geometry.core_radius") ? 100.0 : cfg.real("geometry.core_radius"));
  }
  if (cfg.is_auto("geometry.core_radius")) return CompactCore::for_group(grp, cfg.real("geometry.core_margin"));
  return CompactCore::hyperbolic_radius(cfg.real("geometry.core_radius"));
}

QuadratureSpec quad_from_config(const ExperimentConfig& cfg) {
  QuadratureSpec q;
  q.points = static_cast<int>(cfg.integer("measures.points"));
  q.tolerance = cfg.real("measures.tolerance");
  q.max_word_len = static_cast<int>(cfg.integer("measures.word_length"));
  q.validate();
  return q;
}

void require_hyperbolic(const ModelGeometry& geom, const std::string& command) {
  if (!geom.is_hyperbolic()) throw ValidationError(command + " needs geometry.kind = hyperbolic");
}

std::vector<double> checked_grid(const ExperimentConfig& cfg) {
  std::vector<double> t = cfg.reals("dynamics.t_grid");
  if (t.size() < 2) throw ValidationError("dynamics.t_grid needs at least two times");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < 0.0 || (i > 0 && !(t[i] > t[i - 1]))) {
      throw ValidationError("dynamics.t_grid must be non-negative and increasing");
    }
  }
  return t;
}

DeltaBudget delta_budget(const ExperimentConfig& cfg) {
  DeltaBudget b;
  b.max_len = static_cast<int>(cfg.integer("dynamics.max_word_length"));
  std::int64_t budget = cfg.integer("dynamics.orbit_budget");
  if (budget < 1 || b.max_len < 0) throw ValidationError("orbit budget and word length must be positive");
  b.orbit_budget = static_cast<std::uint64_t>(budget);
  b.margin = cfg.real("dynamics.delta_margin");
  return b;
}

void limsup_warning(RunRecord& r) {
  r.warn("limsup-vs-lim",
         "Q is the slope over a finite window; whether the limit exists or only the limsup is not decided");
}

// Adds delta, its error and delta - n to the summary when the group is non-trivial.
std::optional<DeltaEstimate> attach_delta(const ExperimentConfig& cfg, const SchottkyGroup& grp, RunRecord& r) {
  if (!cfg.boolean("dynamics.compare_delta") || grp.rank() == 0) return std::nullopt;
  DeltaEstimate d = estimate_delta(grp, DeltaMethod::SeriesBisection, delta_budget(cfg));
  r.summary.emplace_back("delta", d.delta);
  r.summary.emplace_back("delta_stderr", d.stderr_);
  r.summary.emplace_back("delta_minus_n", pressure_constant_curvature(d.delta, 1));
  if (d.truncated) {
    r.warn("truncation", "delta series truncated at word length " + std::to_string(d.truncation) +
                             " by the orbit budget");
  }
  return d;
}

// ------------------------------------------------------------ runners

void run_validate_group(const ExperimentConfig& cfg, const RunOptions&, RunRecord& r) {
  SchottkyGroup grp = group_from_config(cfg);
  r.columns = {"letter", "center_x", "center_y", "radius", "min_gap"};
  double overall = 1e300;
  for (Letter l : grp.alphabet()) {
    const EuclideanDisk& d = grp.disk(l);
    double gap = 1e300;
    for (Letter o : grp.alphabet()) {
      if (o == l) continue;
      const EuclideanDisk& e = grp.disk(o);
      gap = std::min(gap, (d.center - e.center).norm() - d.radius - e.radius);
    }
    overall = std::min(overall, gap);
    r.add_row({Word{{l}}.str(), d.center.x(), d.center.y(), d.radius, gap});
  }
  r.summary.emplace_back("rank", static_cast<std::int64_t>(grp.rank()));
  r.summary.emplace_back("min_gap", grp.rank() > 0 ? overall : 0.0);
  r.summary.emplace_back("valid", true);
}

void run_delta(const ExperimentConfig& cfg, const RunOptions&, RunRecord& r) {
  SchottkyGroup grp = group_from_config(cfg);
  r.columns = {"method", "delta", "stderr", "word_length", "truncated"};
  if (grp.rank() == 0) {
    r.add_row({std::string("exact"), 0.0, 0.0, std::int64_t{0}, false});
    r.summary.emplace_back("delta", 0.0);
    return;
  }
  std::string which = cfg.raw("dynamics.delta_method");
  std::vector<DeltaMethod> methods;
  if (which != "orbit-count") methods.push_back(DeltaMethod::SeriesBisection);
  if (which != "bisection") methods.push_back(DeltaMethod::OrbitCountSlope);
  DeltaBudget budget = delta_budget(cfg);
  bool first = true;
  for (DeltaMethod m : methods) {
    DeltaEstimate d = estimate_delta(grp, m, budget);
    r.add_row({std::string(to_string(m)), d.delta, d.stderr_, static_cast<std::int64_t>(d.truncation), d.truncated});
    if (first) {
      r.summary.emplace_back("delta", d.delta);
      r.summary.emplace_back("delta_stderr", d.stderr_);
      r.summary.emplace_back("pressure", pressure_constant_curvature(d.delta, 1));
      first = false;
    }
    if (d.truncated) {
      r.warn("truncation", std::string(to_string(m)) + ": word length truncated to " +
                               std::to_string(d.truncation) + " by the orbit budget");
    }
  }
}

void run_escape_rate(const ExperimentConfig& cfg, const RunOptions& opts, RunRecord& r) {
  ModelGeometry geom = geometry_from_config(cfg);
  require_hyperbolic(geom, "escape-rate");
  SchottkyGroup grp = group_from_config(cfg);
  CompactCore core = core_from_config(cfg, geom, grp);
  TrappedMeasureCurve curve = trapped_measure_curve(core, grp, checked_grid(cfg), mc_options(cfg, opts));
  r.columns = {"t", "measure", "stderr", "n_surviving"};
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    r.add_row({curve.times[i], curve.estimates[i], curve.stderrs[i], static_cast<std::int64_t>(curve.surviving[i])});
  }
  FitWindow w;
  w.t_min = cfg.real("dynamics.fit_t_min");
  if (!cfg.is_auto("dynamics.fit_t_max")) w.t_max = cfg.real("dynamics.fit_t_max");
  w.min_surviving = cfg.integer("dynamics.min_surviving");
  EscapeFit fit = estimate_escape_rate(curve, w);
  r.summary.emplace_back("Q", fit.Q);
  r.summary.emplace_back("Q_stderr", fit.stderr_);
  r.summary.emplace_back("fit_t_min", fit.t_min);
  r.summary.emplace_back("fit_t_max", fit.t_max);
  r.summary.emplace_back("points_used", static_cast<std::int64_t>(fit.points_used));
  r.summary.emplace_back("intercept", fit.intercept);
  r.summary.emplace_back("core_radius", core.radius);
  r.summary.emplace_back("total_volume", curve.total_volume);
  r.summary.emplace_back("reentry_fraction", curve.reentry_fraction);
  if (auto d = attach_delta(cfg, grp, r)) {
    r.summary.emplace_back("escape_minus_pressure", fit.Q - (d->delta - 1.0));
  }
  limsup_warning(r);
  if (curve.reentry_fraction > 0.0) {
    std::ostringstream msg;
    msg << "a fraction " << curve.reentry_fraction << " of samples left the core and re-entered it on the grid";
    r.warn("core-reentry", msg.str());
  }
}

void run_lambda_max(const ExperimentConfig& cfg, const RunOptions& opts, RunRecord& r) {
  ModelGeometry geom = geometry_from_config(cfg);
  SchottkyGroup grp = geom.is_hyperbolic() ? group_from_config(cfg) : SchottkyGroup::trivial();
  CompactCore core = core_from_config(cfg, geom, grp);
  LambdaEstimate est = estimate_lambda_max(core, grp, checked_grid(cfg), mc_options(cfg, opts));
  r.columns = {"t", "lambda_estimate"};
  for (std::size_t i = 0; i < est.times.size(); ++i) r.add_row({est.times[i], est.slopes[i]});
  r.summary.emplace_back("lambda_max", est.value);
  r.summary.emplace_back("trapped_samples", static_cast<std::int64_t>(est.trapped));
  r.summary.emplace_back("core_radius", core.radius);
}

void run_remainder(const ExperimentConfig& cfg, const RunOptions& opts, RunRecord& r) {
  ModelGeometry geom = geometry_from_config(cfg);
  require_hyperbolic(geom, "remainder");
  SchottkyGroup grp = group_from_config(cfg);
  CompactCore core = core_from_config(cfg, geom, grp);
  MonteCarloOptions mc = mc_options(cfg, opts);
  const double Lambda0 = cfg.real("dynamics.lambda0");
  std::vector<double> hs = cfg.reals("semiclassics.h_list");
  if (hs.empty()) throw ValidationError("semiclassics.h_list is empty");
  TrappedMeasureCurve curve = trapped_measure_curve(core, grp, checked_grid(cfg), mc);
  LowerBoundCheck lb = trapped_lower_bound(core, grp, hs, Lambda0, mc);
  r.columns = {"h", "ehrenfest_time", "remainder", "trapped_time", "trapped_measure", "trapped_stderr",
               "ratio_to_sqrt_h"};
  for (std::size_t i = 0; i < hs.size(); ++i) {
    double rem = interpolated_remainder(hs[i], Lambda0, curve);
    r.add_row({hs[i], ehrenfest_time(hs[i], Lambda0), rem, lb.times[i], lb.measures[i], lb.stderrs[i],
               lb.measures[i] / std::sqrt(hs[i])});
  }
  r.summary.emplace_back("lambda0", Lambda0);
  r.summary.emplace_back("lower_bound_c", lb.c);
  r.summary.emplace_back("lower_bound_holds", lb.holds);
  if (auto d = attach_delta(cfg, grp, r)) {
    auto [lo, hi] = remainder_exponents(d->delta, 1);
    r.summary.emplace_back("exponent_lower", lo);
    r.summary.emplace_back("exponent_upper", hi);
  }
  limsup_warning(r);
  if (curve.reentry_fraction > 0.0) {
    std::ostringstream msg;
    msg << "a fraction " << curve.reentry_fraction << " of samples left the core and re-entered it on the grid";
    r.warn("core-reentry", msg.str());
  }
}

void run_measures_compare(const ExperimentConfig& cfg, const RunOptions&, RunRecord& r) {
  ModelGeometry geom = geometry_from_config(cfg);
  require_hyperbolic(geom, "measures-compare");
  SchottkyGroup grp = group_from_config(cfg);
  SymbolFunction a = symbol_from_config(cfg, "measures");
  QuadratureSpec quad = quad_from_config(cfg);
  const double t_max = cfg.real("measures.t_max");
  r.columns = {"xi_angle", "group_sum", "group_sum_error", "pushforward", "pushforward_error",
               "relative_difference", "t_used", "converged", "monotone"};
  double worst = 0.0;
  for (double angle : cfg.reals("measures.xi_angles")) {
    BoundaryPoint xi = BoundaryPoint::from_angle(angle);
    MeasureValue gs = mu_xi_group_sum(grp, xi, a, quad.max_word_len, quad);
    MeasureValue pf = mu_xi_pushforward(geom, grp, xi, a, t_max, quad);
    double rel = std::abs(gs.value - pf.value) / std::max(std::abs(gs.value), 1e-300);
    worst = std::max(worst, rel);
    r.add_row({angle, gs.value, gs.error_bound, pf.value, pf.error_bound, rel, pf.t_used, pf.converged, pf.monotone});
    std::ostringstream where;
    where << "xi angle " << angle;
    if (!pf.converged) {
      r.warn("non-convergence", where.str() + ": pushforward did not converge by t_max = " + std::to_string(t_max));
    }
    if (!pf.monotone) r.warn("non-monotone", where.str() + ": pushforward sequence decreased");
  }
  r.summary.emplace_back("max_relative_difference", worst);
}

void run_disintegration(const ExperimentConfig& cfg, const RunOptions& opts, RunRecord& r) {
  ModelGeometry geom = geometry_from_config(cfg);
  SchottkyGroup grp = geom.is_hyperbolic() ? group_from_config(cfg) : SchottkyGroup::trivial();
  SymbolFunction a = symbol_from_config(cfg, "measures");
  QuadratureSpec quad = quad_from_config(cfg);
  DisintegrationOptions d;
  d.boundary_points = static_cast<int>(cfg.integer("measures.boundary_points"));
  d.mc_samples = cfg.integer("measures.mc_samples");
  d.seed = cfg.unsigned_integer("dynamics.seed");
  d.t_escape = cfg.real("measures.t_escape");
  d.t_max = cfg.real("measures.t_max");
  d.threads = opts.threads;
  const std::vector<std::pair<std::string, std::function<double(const BoundaryPoint&)>>> tests = {
      {"one", [](const BoundaryPoint&) { return 1.0; }},
      {"1+cos/2", [](const BoundaryPoint& x) { return 1.0 + 0.5 * x.p.x(); }},
      {"1+sin2/2", [](const BoundaryPoint& x) { return 1.0 + 0.5 * std::sin(2.0 * x.angle()); }},
  };
  r.columns = {"f", "lhs", "rhs", "gap", "sigma", "quadrature_bound", "dropped_fraction", "within_bound"};
  double dropped = 0.0;
  for (const auto& [name, f] : tests) {
    DisintegrationCheck c = check_disintegration(geom, grp, a, f, quad, d);
    bool ok = c.gap <= 3.0 * c.sigma + c.quadrature_bound;
    r.add_row({name, c.lhs, c.rhs, c.gap, c.sigma, c.quadrature_bound, c.dropped_fraction, ok});
    dropped = std::max(dropped, c.dropped_fraction);
  }
  r.summary.emplace_back("max_dropped_fraction", dropped);
  if (dropped > 0.0) {
    std::ostringstream msg;
    msg << "up to a fraction " << dropped << " of samples had not escaped by t_escape = " << d.t_escape
        << " and were dropped";
    r.warn("dropped-samples", msg.str());
  }
}

void run_planewave(const ExperimentConfig& cfg, const RunOptions&, RunRecord& r) {
  ModelGeometry geom = geometry_from_config(cfg);
  if (cfg.raw("group.kind") != "trivial") throw ValidationError("planewave needs group.kind = trivial");
  if (cfg.real("semiclassics.lambda") != 1.0) {
    throw ValidationError("planewave compares against mu_xi on the unit cosphere and needs semiclassics.lambda = 1");
  }
  SymbolFunction a = symbol_from_config(cfg, "semiclassics");
  QuadratureSpec quad;
  quad.points = static_cast<int>(cfg.integer("semiclassics.points"));
  quad.tolerance = cfg.real("semiclassics.tolerance");
  quad.max_word_len = 0;
  Quantization conv = parse_quantization(cfg.raw("semiclassics.quantization"));
  BoundaryPoint xi = BoundaryPoint::from_angle(cfg.real("semiclassics.xi_angle"));
  ConvergenceStudy st = convergence_study(a, geom, xi, cfg.reals("semiclassics.h_list"), conv, quad);
  r.columns = {"h", "matrix_element_real", "matrix_element_imag", "mu_xi", "abs_error", "quadrature_error"};
  for (const ConvergenceRow& row : st.rows) {
    r.add_row({row.h, row.matrix_element.real(), row.matrix_element.imag(), row.mu_xi, row.abs_error,
               row.quadrature_error});
  }
  r.summary.emplace_back("quantization", to_string(conv));
  r.summary.emplace_back("fitted_order", st.fitted_order);
  r.summary.emplace_back("order_stderr", st.order_stderr);
  r.summary.emplace_back("exact", st.exact);
}

void run_weyl(const ExperimentConfig& cfg, const RunOptions&, RunRecord& r) {
  SymbolFunction a = symbol_from_config(cfg, "semiclassics");
  QuadratureSpec quad;
  quad.points = static_cast<int>(cfg.integer("semiclassics.points"));
  quad.tolerance = cfg.real("semiclassics.tolerance");
  Quantization conv = parse_quantization(cfg.raw("semiclassics.quantization"));
  const double s = cfg.real("semiclassics.energy");
  const bool flat = !a.geometry.is_hyperbolic();
  r.columns = {"h", "leading_term", "scaled", "free_trace", "relative_difference"};
  double first_scaled = 0.0, spread = 0.0, worst = 0.0;
  bool first = true;
  for (double h : cfg.reals("semiclassics.h_list")) {
    double v = weyl_leading_term(a, s, h, 1, conv, quad);
    double scaled = v * h * h;
    double oracle = flat ? free_trace_oracle(a, s, h, 1) : std::numeric_limits<double>::quiet_NaN();
    double rel = flat ? std::abs(v - oracle) / std::abs(oracle) : std::numeric_limits<double>::quiet_NaN();
    r.add_row({h, v, scaled, oracle, rel});
    if (first) {
      first_scaled = scaled;
      first = false;
    }
    spread = std::max(spread, std::abs(scaled - first_scaled) / std::abs(first_scaled));
    if (flat) worst = std::max(worst, rel);
  }
  r.summary.emplace_back("quantization", to_string(conv));
  r.summary.emplace_back("scaling_spread", spread);
  if (flat) r.summary.emplace_back("max_relative_difference", worst);
}

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> m = {
      {"validate-group", run_validate_group}, {"delta", run_delta},
      {"escape-rate", run_escape_rate},       {"lambda-max", run_lambda_max},
      {"remainder", run_remainder},           {"measures-compare", run_measures_compare},
      {"disintegration", run_disintegration}, {"planewave", run_planewave},
      {"weyl", run_weyl},
  };
  return m;
}

std::string cell_text(const Cell& c) {
  std::ostringstream out;
  std::visit([&](const auto& v) {
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, bool>) {
      out << (v ? "true" : "false");
    } else {
      out << v;
    }
  }, c);
  return out.str();
}

}  // namespace

const std::vector<std::string>& experiment_commands() {
  static const std::vector<std::string> c = {"validate-group", "delta",          "escape-rate",
                                             "lambda-max",     "remainder",      "measures-compare",
                                             "disintegration", "planewave",      "weyl"};
  return c;
}

bool is_experiment(const std::string& command) { return runners().count(command) > 0; }

ModelGeometry geometry_from_config(const ExperimentConfig& cfg) {
  bool hyp = cfg.raw("geometry.kind") == "hyperbolic";
  ModelGeometry g = hyp ? ModelGeometry::hyperbolic() : ModelGeometry::euclidean();
  if (!cfg.is_auto("geometry.epsilon0")) g.epsilon0 = cfg.real("geometry.epsilon0");
  g.n = static_cast<int>(cfg.integer("geometry.n"));
  try {
    g.validate();
  } catch (const DomainError& e) {
    throw ValidationError(std::string("geometry: ") + e.what());
  }
  return g;
}

SchottkyGroup group_from_config(const ExperimentConfig& cfg) {
  const std::string& kind = cfg.raw("group.kind");
  if (kind == "trivial") return SchottkyGroup::trivial();
  if (kind == "file") return load_group_file(cfg.resolve_path(cfg.raw("group.file")));
  double ell = cfg.real("group.length");
  if (!(ell > 0.0)) throw ValidationError("group.length must be positive");
  if (kind == "cyclic") return SchottkyGroup::cyclic(ell);
  auto g = cfg.integer("group.generators");
  if (g < 1 || g > 8) throw ValidationError("group.generators must lie in [1, 8]");
  return SchottkyGroup::symmetric(static_cast<int>(g), ell);
}

SymbolFunction symbol_from_config(const ExperimentConfig& cfg, const std::string& prefix) {
  ModelGeometry geom = geometry_from_config(cfg);
  auto key = [&](const char* k) { return prefix + "." + k; };
  Vec2 c = pair_of(cfg, key("symbol_center"));
  double radius = cfg.real(key("symbol_radius"));
  const std::string& kind = cfg.raw(key("fiber"));
  FiberProfile fiber;
  try {
    if (kind == "directional") {
      fiber = FiberProfile::directional(cfg.real(key("fiber_angle")), static_cast<int>(cfg.integer(key("fiber_power"))));
    } else if (kind == "gaussian") {
      fiber = FiberProfile::gaussian(pair_of(cfg, key("fiber_center")), cfg.real(key("fiber_width")));
    } else if (kind == "bump") {
      fiber = FiberProfile::bump(pair_of(cfg, key("fiber_center")), cfg.real(key("fiber_width")));
    }
    BaseShape shape = cfg.raw(key("base_shape")) == "gaussian" ? BaseShape::Gaussian : BaseShape::Bump;
    return make_symbol(geom, BallPoint{c}, radius, fiber, shape);
  } catch (const DomainError& e) {
    throw ValidationError(prefix + " symbol: " + e.what());
  }
}

RunRecord run_experiment(const std::string& command, ExperimentConfig cfg, const RunOptions& opts) {
  auto it = runners().find(command);
  if (it == runners().end()) throw ValidationError("unknown experiment '" + command + "'");
  if (opts.seed) cfg.set("dynamics.seed", std::to_string(*opts.seed));
  RunRecord r;
  r.command = command;
  r.config = cfg.canonical();
  r.config_hash = cfg.hash();
  r.seed = cfg.unsigned_integer("dynamics.seed");
  r.run_id = make_run_id(command, r.config_hash, r.seed);
  r.started = utc_timestamp();
  it->second(cfg, opts, r);
  r.finished = utc_timestamp();
  return r;
}

std::string describe(const RunRecord& r) {
  std::ostringstream out;
  out << "run " << r.run_id << "\n";
  out << "  command      " << r.command << "\n";
  out << "  config hash  " << r.config_hash << "\n";
  out << "  seed         " << r.seed << "\n";
  out << "  started      " << r.started << "\n";
  out << "  finished     " << r.finished << "\n";
  out << "  rows         " << r.rows.size() << " (";
  for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? ", " : "") << r.columns[i];
  out << ")\n";
  for (const auto& [k, v] : r.summary) out << "  " << k << " = " << cell_text(v) << "\n";
  for (const Warning& w : r.warnings) out << "  warning [" << w.code << "] " << w.message << "\n";
  return out.str();
}

}  // namespace escapelab
