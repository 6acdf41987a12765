#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "curvemax/common.hpp"
#include "curvemax/fit.hpp"

namespace curvemax::dilation {

class DilationSet;

struct ExplicitPoints {
  std::vector<double> points;
};

/// [a1, a2]; a1 == 0 or a2 == +inf marks an unbounded generator.
struct IntervalGen {
  double a1 = 1.0;
  double a2 = 2.0;
};

/// {lambda^k : k_min <= k <= k_max}; a missing bound means unbounded in that
/// direction. With both bounds missing the set is invariant under lambda.
struct Lacunary {
  double lambda = 2.0;
  std::optional<std::int64_t> k_min;
  std::optional<std::int64_t> k_max;
};

/// Self-similar Cantor set in [1,2]: `copies` pieces scaled by 1/`divisor`,
/// equally spaced, iterated `level` times.
struct Cantor {
  int copies = 2;
  double divisor = 3.0;
  int level = 8;
};

/// {1 + n^{-a} : 1 <= n <= n_max} together with its limit point 1.
struct ConvexSequence {
  double a = 1.0;
  std::int64_t n_max = 10000;
};

/// Union of 2^k * base over k in `shells`, or over all k when `all_shells`.
struct DyadicUnion {
  std::shared_ptr<const DilationSet> base;
  std::vector<int> shells;
  bool all_shells = false;
};

/// factor * base.
struct Dilated {
  std::shared_ptr<const DilationSet> base;
  double factor = 1.0;
};

using Generator = std::variant<ExplicitPoints, IntervalGen, Lacunary, Cantor,
                               ConvexSequence, DyadicUnion, Dilated>;

/// A set U of positive dilation parameters, given symbolically.
class DilationSet {
 public:
  explicit DilationSet(Generator gen);

  static DilationSet points(std::vector<double> pts);
  static DilationSet interval(double a1, double a2);
  static DilationSet lacunary(double lambda,
                              std::optional<std::int64_t> k_min = std::nullopt,
                              std::optional<std::int64_t> k_max = std::nullopt);
  static DilationSet cantor(int copies, double divisor, int level);
  static DilationSet convex_sequence(double a, std::int64_t n_max);
  static DilationSet dyadic_union(const DilationSet& base, std::vector<int> shells);
  static DilationSet dyadic_union_all(const DilationSet& base);

  [[nodiscard]] DilationSet dilate(double factor) const;

  [[nodiscard]] const Generator& generator() const { return gen_; }
  [[nodiscard]] std::string name() const;

  /// Smallest covering scale at which the representation is exact.
  [[nodiscard]] double resolution_floor() const;

  /// Multiplicative period P (U = P*U), if the generator has one.
  [[nodiscard]] std::optional<double> period() const;

  /// [inf U, sup U]; infinite entries for unbounded generators.
  [[nodiscard]] Interval extent() const;

  /// Sorted, disjoint closed pieces of U intersected with [lo, hi].
  [[nodiscard]] std::vector<Interval> components(double lo, double hi) const;

 private:
  Generator gen_;
  // Precomputed pieces for generators with a finite representation.
  std::shared_ptr<const std::vector<Interval>> pieces_;
};

/// r^{-1} U ∩ [1,2], resolved at scale delta.
struct RescaledSet {
  double r = 1.0;
  double delta = 0.0;
  std::vector<Interval> components;  // subsets of [1,2]

  [[nodiscard]] bool empty() const { return components.empty(); }
  /// Indices k of the cells [1 + k*delta, 1 + (k+1)*delta) meeting the set;
  /// closed pieces ending exactly on a cell boundary do not claim the next cell.
  [[nodiscard]] std::vector<std::int64_t> cells() const;
};

RescaledSet rescale(const DilationSet& u, double r, double delta);

struct CoveringCount {
  std::int64_t count = 0;
  bool empty_set = false;  // warning flag: the set was empty
};

/// Minimal number of closed length-`width` intervals covering the pieces
/// clipped to [lo, hi] (left-to-right greedy, optimal on the line).
std::int64_t greedy_cover(std::span<const Interval> pieces, double lo, double hi,
                          double width);

CoveringCount covering_number(const RescaledSet& e, double delta);

struct SupCovering {
  std::int64_t count = 0;
  double witness_r = 1.0;
  std::size_t grid_points = 0;
};

/// The r-grid searched by sup_covering_number: ratio 1 + delta/8, anchored at
/// r = 1, spanning one period or [inf U / 2, sup U].
std::vector<double> r_grid(const DilationSet& u, double delta);

SupCovering sup_covering_number(const DilationSet& u, double delta);

double kp_value(const DilationSet& u, double delta, double p);

struct ShellCount {
  bool infinite = false;
  std::int64_t value = 0;
};

ShellCount shell_count(const DilationSet& u);

struct PcrEstimate {
  double estimate = 1.0;
  double slope = 0.0;
  bool flat = false;
  std::vector<double> deltas;
  std::vector<std::int64_t> counts;
  std::vector<double> residuals;
  double residual_norm = 0.0;
};

PcrEstimate pcr_estimate(const DilationSet& u, double delta_min, double delta_max,
                         double samples_per_decade);

struct CoveringProfile {
  std::vector<double> deltas;
  std::vector<std::int64_t> counts;
  std::vector<double> witness_r;
};

CoveringProfile covering_profile(const DilationSet& u, std::span<const double> deltas);

/// CSV with header `delta,sup_count,witness_r`.
void write_covering_profile_csv(std::ostream& os, const CoveringProfile& profile);

}  // namespace curvemax::dilation
