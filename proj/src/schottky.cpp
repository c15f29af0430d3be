#include "schottky.hpp"

#include "errors.hpp"
#include "numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace escapelab {

bool Word::is_reduced() const {
  for (std::size_t i = 1; i < letters.size(); ++i)
    if (letters[i] == -letters[i - 1]) return false;
  return true;
}

std::string Word::str() const {
  if (letters.empty()) return "e";
  std::string s;
  for (Letter l : letters) {
    char c = static_cast<char>('a' + (std::abs(l) - 1));
    s.push_back(l > 0 ? c : static_cast<char>(c - 'a' + 'A'));
  }
  return s;
}

Word concat_reduced(const Word& a, const Word& b) {
  Word out = a;
  for (Letter l : b.letters) {
    if (!out.letters.empty() && out.letters.back() == -l) {
      out.letters.pop_back();
    } else {
      out.letters.push_back(l);
    }
  }
  return out;
}

Word inverse(const Word& w) {
  Word out;
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) out.letters.push_back(-*it);
  return out;
}

// ------------------------------------------------------------ SchottkyGroup

SchottkyGroup::SchottkyGroup(std::vector<Isometry> generators, std::vector<EuclideanDisk> minus_disks,
                             std::vector<EuclideanDisk> plus_disks, BallPoint basepoint)
    : gens_(std::move(generators)),
      minus_(std::move(minus_disks)),
      plus_(std::move(plus_disks)),
      basepoint_(basepoint) {
  if (minus_.size() != gens_.size() || plus_.size() != gens_.size()) {
    throw ValidationError("need one pair of disks per generator");
  }
  if (!(basepoint_.q.squaredNorm() < 1.0)) throw ValidationError("basepoint must lie in the open ball");
  for (const auto& g : gens_) gens_inv_.push_back(g.inverse());
  validate();
}

SchottkyGroup SchottkyGroup::trivial() { return SchottkyGroup({}, {}, {}); }

SchottkyGroup SchottkyGroup::symmetric(int g, double ell) {
  if (g < 0) throw ValidationError("rank must be non-negative");
  if (!(ell > 0.0)) throw ValidationError("translation length must be positive");
  std::vector<Isometry> gens;
  std::vector<EuclideanDisk> minus, plus;
  double centre = 1.0 / std::tanh(0.5 * ell), radius = 1.0 / std::sinh(0.5 * ell);
  for (int k = 0; k < g; ++k) {
    double angle = k * std::numbers::pi / g;
    Vec2 u(std::cos(angle), std::sin(angle));
    gens.push_back(Isometry::translation(ell, angle));
    minus.push_back({-centre * u, radius});
    plus.push_back({centre * u, radius});
  }
  return SchottkyGroup(std::move(gens), std::move(minus), std::move(plus));
}

std::vector<Letter> SchottkyGroup::alphabet() const {
  std::vector<Letter> out;
  for (int k = 1; k <= rank(); ++k) {
    out.push_back(k);
    out.push_back(-k);
  }
  return out;
}

Isometry SchottkyGroup::matrix(const Word& w) const {
  Isometry out;
  for (Letter l : w.letters) {
    if (l == 0 || std::abs(l) > rank()) throw ValidationError("letter out of range in word " + w.str());
    out = out * letter(l);
  }
  return out;
}

Letter SchottkyGroup::containing_disk(const Vec2& q) const {
  for (int k = 0; k < rank(); ++k) {
    if ((q - plus_[k].center).squaredNorm() < plus_[k].radius * plus_[k].radius) return k + 1;
    if ((q - minus_[k].center).squaredNorm() < minus_[k].radius * minus_[k].radius) return -(k + 1);
  }
  return 0;
}

void SchottkyGroup::validate() const {
  std::vector<Letter> letters = alphabet();
  for (std::size_t i = 0; i < letters.size(); ++i) {
    const EuclideanDisk& a = disk(letters[i]);
    if (!(a.radius > 0.0)) throw ValidationError("disk radius must be positive");
    for (std::size_t j = i + 1; j < letters.size(); ++j) {
      const EuclideanDisk& b = disk(letters[j]);
      double gap = (a.center - b.center).norm() - a.radius - b.radius;
      if (!(gap > 0.0)) {
        Word wi{{letters[i]}}, wj{{letters[j]}};
        std::ostringstream msg;
        msg << "Schottky disks " << wi.str() << " and " << wj.str() << " overlap (gap " << gap << ")";
        throw ValidationError(msg.str());
      }
    }
  }
  for (int k = 0; k < rank(); ++k) {
    const EuclideanDisk& from = minus_[k];
    const EuclideanDisk& to = plus_[k];
    for (int i = 0; i < 16; ++i) {
      double th = 2.0 * std::numbers::pi * (i + 0.5) / 16.0;
      Vec2 u(std::cos(th), std::sin(th));
      cplx img = gens_[k].act(to_complex(from.center + from.radius * u));
      double off = std::abs(std::abs(img - to_complex(to.center)) - to.radius);
      if (!(off <= 1e-8 * std::max(1.0, to.radius))) {
        throw ValidationError("generator " + Word{{k + 1}}.str() +
                              " does not map its minus disk boundary onto its plus disk boundary");
      }
      cplx outside = gens_[k].act(to_complex(from.center + 2.0 * from.radius * u));
      if (!(std::abs(outside - to_complex(to.center)) < to.radius)) {
        throw ValidationError("generator " + Word{{k + 1}}.str() +
                              " does not map the exterior of its minus disk into its plus disk");
      }
    }
  }
}

// ------------------------------------------------------------ enumeration

std::uint64_t word_count(int rank, int max_len) {
  if (rank == 0 || max_len <= 0) return 1;
  long double total = 1.0L, shell = 2.0L * rank;
  for (int k = 1; k <= max_len; ++k) {
    total += shell;
    shell *= (2.0L * rank - 1.0L);
    if (total > 1.8e19L) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(total);
}

int complete_length_within(int rank, int max_len, std::uint64_t budget) {
  if (rank == 1) {
    // the cyclic group has 2L + 1 elements of length <= L
    return static_cast<int>(std::min<std::uint64_t>(max_len, budget > 0 ? (budget - 1) / 2 : 0));
  }
  int len = 0;
  while (len < max_len && word_count(rank, len + 1) <= budget) ++len;
  return len;
}

namespace {

template <class Visit>
void dfs(const std::vector<Isometry>& gens, const std::vector<Isometry>& inv, int max_len,
         std::vector<Letter>& stack, const Isometry& current, Visit& visit) {
  visit(std::span<const Letter>(stack), current);
  if (static_cast<int>(stack.size()) == max_len) return;
  int rank = static_cast<int>(gens.size());
  for (int k = 1; k <= rank; ++k) {
    for (Letter l : {k, -k}) {
      if (!stack.empty() && stack.back() == -l) continue;
      stack.push_back(l);
      dfs(gens, inv, max_len, stack, current * (l > 0 ? gens[l - 1] : inv[-l - 1]), visit);
      stack.pop_back();
    }
  }
}

// Generators conjugated so that the basepoint sits at the origin.
void conjugated(const SchottkyGroup& grp, const BallPoint& basepoint, std::vector<Isometry>& gens,
                std::vector<Isometry>& inv) {
  Isometry t = translation_to(basepoint), ti = t.inverse();
  gens.clear();
  inv.clear();
  for (const auto& g : grp.generators()) {
    gens.push_back(ti * g * t);
    inv.push_back(ti * g.inverse() * t);
  }
}

double origin_distance(const Isometry& g) { return 2.0 * std::log(std::abs(g.alpha()) + std::abs(g.beta())); }

// Orbit distances d(o, gamma o) grouped by word length.
std::vector<std::vector<double>> shell_distances(const SchottkyGroup& grp, const BallPoint& o, int len) {
  std::vector<Isometry> gens, inv;
  conjugated(grp, o, gens, inv);
  std::vector<std::vector<double>> shells(len + 1);
  for (int k = 0; k <= len; ++k) {
    std::uint64_t count = word_count(grp.rank(), k) - (k > 0 ? word_count(grp.rank(), k - 1) : 0);
    shells[k].reserve(count);
  }
  std::vector<Letter> stack;
  auto visit = [&](std::span<const Letter> w, const Isometry& g) { shells[w.size()].push_back(origin_distance(g)); };
  dfs(gens, inv, len, stack, Isometry(), visit);
  return shells;
}

double shell_sum(const std::vector<double>& d, double s) {
  double sum = 0.0;
  for (double x : d) sum += std::exp(-s * x);
  return sum;
}

// log of the shell sum, safe against underflow for long words
double shell_log_sum(const std::vector<double>& d, double s) {
  double lo = *std::min_element(d.begin(), d.end());
  double sum = 0.0;
  for (double x : d) sum += std::exp(-s * (x - lo));
  return std::log(sum) - s * lo;
}

}  // namespace

void visit_words(const SchottkyGroup& grp, int max_len,
                 const std::function<void(std::span<const Letter>, const Isometry&)>& visit) {
  if (max_len < 0) throw DomainError("max_len must be non-negative");
  std::vector<Isometry> gens = grp.generators(), inv;
  for (const auto& g : gens) inv.push_back(g.inverse());
  std::vector<Letter> stack;
  dfs(gens, inv, max_len, stack, Isometry(), visit);
}

WordEnumeration enumerate_words(const SchottkyGroup& grp, int max_len, std::uint64_t budget) {
  if (max_len < 0) throw DomainError("max_len must be non-negative");
  WordEnumeration out;
  out.complete_length = complete_length_within(grp.rank(), max_len, budget);
  out.truncated = out.complete_length < max_len;
  std::vector<std::vector<WordEntry>> shells(out.complete_length + 1);
  visit_words(grp, out.complete_length, [&](std::span<const Letter> w, const Isometry& g) {
    shells[w.size()].push_back({Word{std::vector<Letter>(w.begin(), w.end())}, g});
  });
  for (auto& shell : shells)
    for (auto& e : shell) out.words.push_back(std::move(e));
  return out;
}

PoincarePartial poincare_partial_at(const SchottkyGroup& grp, const BallPoint& basepoint, double s,
                                    int max_len, std::uint64_t budget) {
  if (!(s > 0.0)) throw DomainError("Poincare series exponent must be positive");
  if (max_len < 0) throw DomainError("max_len must be non-negative");
  PoincarePartial out;
  int len = complete_length_within(grp.rank(), max_len, budget);
  out.truncated = len < max_len;
  auto shells = shell_distances(grp, basepoint, len);
  for (const auto& shell : shells) {
    out.shell_sums.push_back(shell_sum(shell, s));
    out.partial_sum += out.shell_sums.back();
  }
  std::size_t k = out.shell_sums.size();
  if (k >= 2 && out.shell_sums[k - 2] > 0.0) out.tail_ratio = out.shell_sums[k - 1] / out.shell_sums[k - 2];
  return out;
}

PoincarePartial poincare_partial(const SchottkyGroup& grp, double s, int max_len, std::uint64_t budget) {
  return poincare_partial_at(grp, grp.basepoint(), s, max_len, budget);
}

const char* to_string(DeltaMethod m) {
  return m == DeltaMethod::SeriesBisection ? "series-bisection" : "orbit-count-slope";
}

int default_delta_length(int rank) { return rank <= 1 ? 200 : 14; }

namespace {

// Smallest s in [0, hi] with S_L(s) / S_{L-1}(s) < target.
double ratio_crossing(const std::vector<double>& last, const std::vector<double>& prev, double target,
                      double hi, double tol) {
  auto ratio = [&](double s) { return std::exp(shell_log_sum(last, s) - shell_log_sum(prev, s)); };
  if (ratio(0.0) < target) return 0.0;
  double lo = 0.0;
  while (!(ratio(hi) < target)) {
    hi *= 2.0;
    if (hi > 1e3) throw SignalError("shell ratio does not decay; orbit data is degenerate");
  }
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    (ratio(mid) < target ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

DeltaEstimate estimate_delta(const SchottkyGroup& grp, DeltaMethod method, const DeltaBudget& budget) {
  DeltaEstimate est;
  est.method = method;
  if (grp.rank() == 0) return est;
  int requested = budget.max_len > 0 ? budget.max_len : default_delta_length(grp.rank());
  int len = complete_length_within(grp.rank(), requested, budget.orbit_budget);
  est.truncation = len;
  est.truncated = len < requested;
  if (len < 3) throw SignalError("orbit budget too small to estimate delta");
  auto shells = shell_distances(grp, grp.basepoint(), len);
  const double n = grp.n();

  if (method == DeltaMethod::SeriesBisection) {
    double target = 1.0 - budget.margin;
    double s_last = ratio_crossing(shells[len], shells[len - 1], target, 2.0 * n, budget.tolerance);
    double s_prev = ratio_crossing(shells[len - 1], shells[len - 2], target, 2.0 * n, budget.tolerance);
    // the crossing of 1 itself brackets delta from the other side
    double s_one = ratio_crossing(shells[len], shells[len - 1], 1.0 - 1e-12, 2.0 * n, budget.tolerance);
    est.delta = s_last;
    est.stderr_ = std::max({0.5 * budget.tolerance, std::abs(s_last - s_prev), s_last - s_one});
  } else {
    std::vector<double> all;
    for (const auto& sh : shells) all.insert(all.end(), sh.begin(), sh.end());
    std::sort(all.begin(), all.end());
    double t_c = *std::min_element(shells[len].begin(), shells[len].end());
    const int points = 24;
    std::vector<double> ts, logs;
    for (int i = 0; i < points; ++i) {
      double t = t_c * (0.5 + 0.5 * i / (points - 1));
      auto count = std::upper_bound(all.begin(), all.end(), t) - all.begin();
      ts.push_back(t);
      logs.push_back(std::log(static_cast<double>(count)));
    }
    LineFit fit = line_fit(ts, logs);
    est.delta = fit.slope;
    est.stderr_ = fit.slope_stderr;
  }
  if (est.truncated) est.stderr_ *= 2.0;
  return est;
}

// ------------------------------------------------------------ reduction

Reduction reduce_to_domain(const SchottkyGroup& grp, const BallPoint& q, int max_steps) {
  if (!(q.q.squaredNorm() < 1.0)) throw DomainError("reduction needs an interior point");
  Reduction out{q, {}};
  cplx w = to_complex(q.q);
  for (int step = 0;; ++step) {
    Letter l = grp.containing_disk(to_vec(w));
    if (l == 0) break;
    if (step >= max_steps) throw ReductionError("reduction did not terminate; group data is invalid");
    w = grp.letter(-l).act(w);
    out.word.letters.push_back(l);
  }
  out.point.q = to_vec(w);
  return out;
}

int reduce_frame(const SchottkyGroup& grp, Frame& f, Word* word, int max_steps) {
  int steps = 0;
  for (;;) {
    Letter l = grp.containing_disk(f.base_vec());
    if (l == 0) break;
    if (steps >= max_steps) throw ReductionError("frame reduction did not terminate; group data is invalid");
    f.a = grp.letter(-l).matrix() * f.a;
    if (word) word->letters.push_back(l);
    ++steps;
  }
  if (steps > 0) f.a /= std::sqrt(f.a.determinant());
  return steps;
}

// ------------------------------------------------------------ limit set

namespace {

std::vector<cplx> boundary_fixed_points(const Isometry& g) {
  cplx al = g.alpha(), be = g.beta();
  if (std::abs(be) < 1e-14) return {};
  cplx b = std::conj(al) - al;
  cplx disc = std::sqrt(b * b + 4.0 * std::conj(be) * be);
  std::vector<cplx> out;
  for (cplx r : {(-b + disc) / (2.0 * std::conj(be)), (-b - disc) / (2.0 * std::conj(be))}) {
    out.push_back(r / std::abs(r));
  }
  return out;
}

EuclideanDisk circle_image(const Isometry& g, const EuclideanDisk& d) {
  cplx p[3];
  for (int i = 0; i < 3; ++i) {
    double th = 2.0 * std::numbers::pi * i / 3.0;
    p[i] = g.act(to_complex(d.center) + d.radius * std::polar(1.0, th));
  }
  // circumcircle of three points
  cplx a = p[0], b = p[1] - a, c = p[2] - a;
  double den = 2.0 * (b.real() * c.imag() - b.imag() * c.real());
  double bb = std::norm(b), cc = std::norm(c);
  cplx u((c.imag() * bb - b.imag() * cc) / den, (b.real() * cc - c.real() * bb) / den);
  return {to_vec(a + u), std::abs(u)};
}

}  // namespace

std::vector<BoundaryPoint> limit_set_sample(const SchottkyGroup& grp, int depth) {
  if (depth < 1) throw DomainError("limit set depth must be at least 1");
  std::vector<cplx> seeds;
  for (const auto& g : grp.generators())
    for (cplx z : boundary_fixed_points(g)) seeds.push_back(z);
  std::vector<double> angles;
  visit_words(grp, depth, [&](std::span<const Letter>, const Isometry& g) {
    for (cplx z : seeds) angles.push_back(std::arg(g.act(z)));
  });
  std::sort(angles.begin(), angles.end());
  std::vector<BoundaryPoint> out;
  for (double a : angles) {
    if (!out.empty() && std::abs(a - out.back().angle()) < 1e-12) continue;
    out.push_back(BoundaryPoint::from_angle(a));
  }
  if (out.size() > 1 && std::abs(out.front().angle() + 2.0 * std::numbers::pi - out.back().angle()) < 1e-12) {
    out.pop_back();
  }
  return out;
}

std::vector<EuclideanDisk> refined_disks(const SchottkyGroup& grp, int depth) {
  if (depth < 1) throw DomainError("refinement depth must be at least 1");
  std::vector<EuclideanDisk> out;
  visit_words(grp, depth - 1, [&](std::span<const Letter> w, const Isometry& g) {
    if (static_cast<int>(w.size()) != depth - 1) return;
    for (Letter l : grp.alphabet()) {
      if (!w.empty() && w.back() == -l) continue;
      out.push_back(w.empty() ? grp.disk(l) : circle_image(g, grp.disk(l)));
    }
  });
  return out;
}

double box_counting_dimension(const std::vector<BoundaryPoint>& pts, double eps_min, double eps_max, int scales) {
  if (pts.size() < 2) return 0.0;
  std::vector<double> angles;
  for (const auto& p : pts) angles.push_back(std::atan2(p.p.y(), p.p.x()) + std::numbers::pi);
  std::vector<double> xs, ys;
  for (int i = 0; i < scales; ++i) {
    double eps = eps_max * std::pow(eps_min / eps_max, static_cast<double>(i) / (scales - 1));
    std::vector<long long> boxes;
    for (double a : angles) boxes.push_back(static_cast<long long>(std::floor(a / eps)));
    std::sort(boxes.begin(), boxes.end());
    auto count = std::unique(boxes.begin(), boxes.end()) - boxes.begin();
    xs.push_back(-std::log(eps));
    ys.push_back(std::log(static_cast<double>(count)));
  }
  return line_fit(xs, ys).slope;
}

}  // namespace escapelab
