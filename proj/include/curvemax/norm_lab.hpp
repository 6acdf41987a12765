#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "curvemax/cutoffs.hpp"
#include "curvemax/dilation_sets.hpp"
#include "curvemax/field.hpp"
#include "curvemax/freq_decomp.hpp"

namespace curvemax {

/// Lattice spacing of the witness raster is L/n; f_delta lives on the
/// periodic n x n grid, the tubes on a window of the same spacing.
struct WitnessGrid {
  std::size_t n = 2048;
  double L = 4.0;
};

/// {1 <= x1 <= 2, |x2 - u x1^b| <= half_width}
struct Tube {
  double u = 1.0;
  double half_width = 0.0;
};

/// Cell-centred raster window [1,2] x [x2_lo, x2_lo + rows*h].
struct RasterWindow {
  double h = 0.0;
  std::size_t cols = 0;
  std::size_t rows = 0;
  double x2_lo = 0.0;
  [[nodiscard]] double x1(std::size_t i) const { return 1.0 + (static_cast<double>(i) + 0.5) * h; }
  [[nodiscard]] double x2(std::size_t k) const { return x2_lo + (static_cast<double>(k) + 0.5) * h; }
};

struct WitnessPack {
  double delta = 0.0;
  double r = 1.0;
  double b = 2.0;
  double c_scale = 1.0;             // |c_+|, folded into the dilations
  std::vector<double> separated_set;  // normalized dilations in [1,2]
  std::int64_t covering_count = 0;    // N(U^r, delta)
  SampledField2D f_delta;
  std::vector<Tube> tubes;
  RasterWindow window;
  double eps_b = 0.0;
  std::string warning;  // set when U^r is empty
};

[[nodiscard]] double eps_b(double b);

/// Greedy left-to-right maximal `sep`-separated subset of the pieces.
[[nodiscard]] std::vector<double> separated_subset(std::span<const Interval> pieces, double sep);

WitnessPack build_witness(const HomogeneousCurve& curve, const dilation::DilationSet& U, double r, double delta,
                          const WitnessGrid& grid = {});

struct TubeRasterReport {
  bool disjoint = true;         // no raster cell touched by two tubes
  double union_measure = 0.0;   // h^2 * #cell centres in the union
  double expected_measure = 0.0;
  double rel_error = 0.0;
};
TubeRasterReport check_tubes(const WitnessPack& pack);

/// t-intervals inside [x1 - delta, x1 + delta] on which (x1 - t, x2 - u t^b)
/// lies in the closed delta-ball; sign changes located by sampling and
/// refined by bisection. Requires x1 > delta.
std::vector<Interval> ball_hits(double b, double u, double delta, double x1, double x2);

/// Exact H^(u) f_delta and M^(u) f_delta (one-sided averages over [0,R]) at x.
double hilbert_of_ball(double b, double u, double delta, double x1, double x2);
double average_of_ball(double b, double u, double delta, double x1, double x2);

enum class WitnessKind { hilbert, average };

struct WitnessRatio {
  double ratio = 0.0;       // ||Op f_delta||_p over the window / ||f_delta||_p
  double predicted = 0.0;   // delta^{1-1/p} count^{1/p}
  double op_norm = 0.0;
  double f_norm = 0.0;
  double min_tube_value = 0.0;  // min of Op^(u) f_delta over cell centres of V(u)
  double pointwise_bound = 0.0; // (eps_b / 3) delta
  double analytic_lower = 0.0;  // pointwise_bound * union_measure^{1/p} / f_norm
  std::size_t tube_points = 0;
};

WitnessRatio witness_ratio(const WitnessPack& pack, double p, WitnessKind kind);

/// Operators whose L^2 norm is not a symbol maximum.
struct NonlinearOperator {
  std::string name;
};
using NormTarget = std::variant<OperatorPiece, std::vector<OperatorPiece>, Spectrum, NonlinearOperator>;

/// Exact translation-invariant L^2 norm on the discrete torus: max |symbol|,
/// for compositions max of the pointwise product.
double l2_symbol_norm(const MultiplierBank& bank, const NormTarget& target);

struct ScalingReport {
  std::string quantity;
  std::vector<double> scales;
  std::vector<double> values;
  double exponent = 0.0;
  double log_prefactor = 0.0;
  std::vector<double> residuals;  // in log value
  double residual_norm = 0.0;
  std::optional<double> target;
};

ScalingReport scaling_fit(std::string quantity, std::span<const double> scales, std::span<const double> values,
                          std::optional<double> target = std::nullopt);

/// CSV with header `scale,value,fit,resid`.
void write_scaling_csv(std::ostream& os, const ScalingReport& r);

struct PredictedBound {
  double value = 0.0;
  bool infinite = false;
};

[[nodiscard]] double theta(double p, int ell);

/// Right-hand sides of the M^U and H^U estimates with the constant set to 1.
PredictedBound predicted_upper_bound(const dilation::DilationSet& U, double p, int ell_max, WitnessKind kind);

struct WitnessRow {
  double delta = 0.0;
  std::int64_t count = 0;
  double ratio = 0.0;
  double predicted = 0.0;
};

/// CSV with header `delta,count,ratio,predicted,ratio_over_predicted`.
void write_witness_csv(std::ostream& os, std::span<const WitnessRow> rows);

}  // namespace curvemax
