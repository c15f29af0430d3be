#pragma once

#include "geometry.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace escapelab {

// Letters are +k for generator k (1-based) and -k for its inverse.
using Letter = int;

struct Word {
  std::vector<Letter> letters;

  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
  bool is_reduced() const;
  std::string str() const;
  bool operator==(const Word&) const = default;
};

// Free reduction of the concatenation a b.
Word concat_reduced(const Word& a, const Word& b);
Word inverse(const Word& w);

class SchottkyGroup {
 public:
  // generators[k] maps the exterior of minus_disks[k] onto the interior of
  // plus_disks[k]. Throws ValidationError when the disks overlap or the
  // generators do not pair them.
  SchottkyGroup(std::vector<Isometry> generators, std::vector<EuclideanDisk> minus_disks,
                std::vector<EuclideanDisk> plus_disks, BallPoint basepoint = {});

  static SchottkyGroup trivial();
  // g generators of translation length ell along axes at angles k*pi/g.
  static SchottkyGroup symmetric(int g, double ell);
  static SchottkyGroup cyclic(double ell) { return symmetric(1, ell); }

  int rank() const { return static_cast<int>(gens_.size()); }
  int n() const { return 1; }
  const BallPoint& basepoint() const { return basepoint_; }
  const std::vector<Isometry>& generators() const { return gens_; }
  const std::vector<EuclideanDisk>& minus_disks() const { return minus_; }
  const std::vector<EuclideanDisk>& plus_disks() const { return plus_; }

  const Isometry& letter(Letter l) const { return l > 0 ? gens_[l - 1] : gens_inv_[-l - 1]; }
  // Disk containing the image of letter l: plus disk for l > 0, minus disk for l < 0.
  const EuclideanDisk& disk(Letter l) const { return l > 0 ? plus_[l - 1] : minus_[-l - 1]; }
  std::vector<Letter> alphabet() const;

  Isometry matrix(const Word& w) const;

  // Open-disk membership; returns 0 when q lies in the closed fundamental domain.
  Letter containing_disk(const Vec2& q) const;
  bool in_domain(const Vec2& q) const { return containing_disk(q) == 0; }

 private:
  void validate() const;

  std::vector<Isometry> gens_;
  std::vector<Isometry> gens_inv_;
  std::vector<EuclideanDisk> minus_;
  std::vector<EuclideanDisk> plus_;
  BallPoint basepoint_;
};

// Number of reduced words of length <= max_len.
std::uint64_t word_count(int rank, int max_len);
// Largest length whose complete ball fits in the budget.
int complete_length_within(int rank, int max_len, std::uint64_t budget);

struct WordEntry {
  Word word;
  Isometry element;
};

struct WordEnumeration {
  std::vector<WordEntry> words;  // shell order, identity first
  int complete_length = 0;
  bool truncated = false;
};

inline constexpr std::uint64_t kDefaultOrbitBudget = 5'000'000;

WordEnumeration enumerate_words(const SchottkyGroup& grp, int max_len,
                                std::uint64_t budget = kDefaultOrbitBudget);

// Depth-first visit of every reduced word up to max_len (no budget check).
void visit_words(const SchottkyGroup& grp, int max_len,
                 const std::function<void(std::span<const Letter>, const Isometry&)>& visit);

struct PoincarePartial {
  double partial_sum = 0.0;
  double tail_ratio = 0.0;               // last shell sum over the previous one
  std::vector<double> shell_sums;        // index = word length
  bool truncated = false;
};

PoincarePartial poincare_partial(const SchottkyGroup& grp, double s, int max_len,
                                 std::uint64_t budget = kDefaultOrbitBudget);
PoincarePartial poincare_partial_at(const SchottkyGroup& grp, const BallPoint& basepoint, double s,
                                    int max_len, std::uint64_t budget = kDefaultOrbitBudget);

enum class DeltaMethod { SeriesBisection, OrbitCountSlope };
const char* to_string(DeltaMethod m);

struct DeltaBudget {
  int max_len = 0;  // 0 selects the default for the rank
  std::uint64_t orbit_budget = kDefaultOrbitBudget;
  double margin = 0.02;
  double tolerance = 1e-6;
};

struct DeltaEstimate {
  double delta = 0.0;
  double stderr_ = 0.0;
  DeltaMethod method = DeltaMethod::SeriesBisection;
  int truncation = 0;  // word length actually used
  bool truncated = false;
};

int default_delta_length(int rank);
DeltaEstimate estimate_delta(const SchottkyGroup& grp, DeltaMethod method, const DeltaBudget& budget = {});

struct Reduction {
  BallPoint point;
  Word word;  // word(point) == original point
};

Reduction reduce_to_domain(const SchottkyGroup& grp, const BallPoint& q, int max_steps = 100000);

// Reduces a frame so its base point lies in the fundamental domain. Returns
// the number of reduction steps; letters are appended to word when given.
int reduce_frame(const SchottkyGroup& grp, Frame& f, Word* word = nullptr, int max_steps = 100000);

std::vector<BoundaryPoint> limit_set_sample(const SchottkyGroup& grp, int depth);

// Images of the Schottky disks under all reduced words of the given depth.
std::vector<EuclideanDisk> refined_disks(const SchottkyGroup& grp, int depth);

// Box-counting dimension of a set of boundary points measured in angle.
double box_counting_dimension(const std::vector<BoundaryPoint>& pts, double eps_min, double eps_max,
                              int scales = 12);

}  // namespace escapelab
