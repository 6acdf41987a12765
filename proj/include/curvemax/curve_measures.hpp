#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "curvemax/cutoffs.hpp"
#include "curvemax/field.hpp"

namespace curvemax {

/// Midpoint nodes on the rescaled block s in [1/2, 2]. A dyadic block at
/// level j uses t = 2^{-j} s; the negative block mirrors it, so both sides
/// share one weight array and p.v. sums cancel constants exactly.
struct QuadratureScheme {
  int nodes_per_block = 0;
  bool symmetric = true;
  std::vector<double> s;        // nodes with chi_plus(s) > 0
  std::vector<double> w_tau;    // chi_plus(s) ds
  std::vector<double> w_sigma;  // chi_plus(s) ds / s

  static QuadratureScheme midpoint(int nodes_per_block);
  [[nodiscard]] QuadratureScheme refined() const { return midpoint(2 * nodes_per_block); }
};

/// Displacements x - (t, u gamma(t)) at the nodes of one dyadic block.
struct BlockNodes {
  std::vector<double> d1_plus, d2_plus;
  std::vector<double> d1_minus, d2_minus;  // filled for sigma only
  std::vector<double> w;
};

/// Largest displacement of the level-j kernel in each coordinate.
struct Reach {
  double x1 = 0.0;
  double x2 = 0.0;
};
[[nodiscard]] Reach kernel_reach(const HomogeneousCurve& curve, int j, double u, bool two_sided);
/// Throws ReachError naming j when the kernel would wrap on a grid of side L.
void check_reach(const HomogeneousCurve& curve, int j, double u, double L, bool two_sided);
/// Smallest j whose kernel fits inside L/8.
[[nodiscard]] int min_admissible_j(const HomogeneousCurve& curve, double u, double L, bool two_sided);

[[nodiscard]] BlockNodes tau_nodes(const HomogeneousCurve& curve, int j, double u, const QuadratureScheme& q);
[[nodiscard]] BlockNodes sigma_nodes(const HomogeneousCurve& curve, int j, double u, const QuadratureScheme& q);

template <class Source>
double tau_at(const BlockNodes& nd, const Source& f, double x1, double x2) {
  double acc = 0.0;
  for (std::size_t k = 0; k < nd.w.size(); ++k) acc += nd.w[k] * f(x1 - nd.d1_plus[k], x2 - nd.d2_plus[k]);
  return acc;
}

template <class Source>
double sigma_at(const BlockNodes& nd, const Source& f, double x1, double x2) {
  double acc = 0.0;
  for (std::size_t k = 0; k < nd.w.size(); ++k)
    acc += nd.w[k] * (f(x1 - nd.d1_plus[k], x2 - nd.d2_plus[k]) - f(x1 - nd.d1_minus[k], x2 - nd.d2_minus[k]));
  return acc;
}

/// x -> int f(x - (t, u gamma(t))) 2^j chi_plus(2^j t) dt.
SampledField2D tau_convolve(const HomogeneousCurve& curve, int j, double u, const SampledField2D& f,
                            const QuadratureScheme& q);
/// x -> p.v. int f(x - (t, u gamma(t))) chi(2^j t) dt / t.
SampledField2D sigma_convolve(const HomogeneousCurve& curve, int j, double u, const SampledField2D& f,
                              const QuadratureScheme& q);

/// Output at q together with max |out(q) - out(q at half the nodes)|.
struct EstimatedField {
  SampledField2D value;
  double error_estimate = 0.0;
};
EstimatedField tau_convolve_estimated(const HomogeneousCurve& curve, int j, double u, const SampledField2D& f,
                                      const QuadratureScheme& q);

struct HilbertResult {
  SampledField2D field;
  int j_min = 0;
  int j_max = 0;
  int clipped_by_reach = 0;  // levels of [-J, J] dropped by the reach rule
  double kernel_t_min = 0.0; // retained kernel lives in 2^{-j_max-1} < |t| < 2^{1-j_min}
  double kernel_t_max = 0.0;
};

/// Levels whose kernel is narrower than a quarter cell carry nothing the
/// bilinear sampler can resolve; this J cuts there.
[[nodiscard]] int default_truncation(double h);

/// sum over j in [max(-J, j_reach), J] of sigma_j^u * f, ascending in j.
HilbertResult hilbert_op(const HomogeneousCurve& curve, double u, const SampledField2D& f,
                         std::optional<int> J, const QuadratureScheme& q);

template <class Source>
double hilbert_at(std::span<const BlockNodes> levels, const Source& f, double x1, double x2) {
  double acc = 0.0;
  for (const auto& nd : levels) acc += sigma_at(nd, f, x1, x2);
  return acc;
}

/// One-sided averages (1/R) int_0^R |f(x - (t, u gamma(t)))| dt over R in
/// R_grid. Each gap between consecutive radii is split into `substeps`
/// midpoint cells; the node set depends on R_grid and substeps only.
struct MaxOpOptions {
  std::vector<double> R_grid;
  int substeps = 8;
};

/// {2^{k/4} h} while the curve piece up to R stays within L/8.
[[nodiscard]] std::vector<double> default_R_grid(const HomogeneousCurve& curve, double u, double h, double L);

struct MaxNodes {
  std::vector<double> t;
  std::vector<double> d2;
  std::vector<double> w;
  std::vector<std::size_t> segment_end;  // cumulative node count at each R
  std::vector<double> R;
};
[[nodiscard]] MaxNodes max_nodes(const HomogeneousCurve& curve, double u, const MaxOpOptions& opt);

template <class Source>
double max_at(const MaxNodes& nd, const Source& f, double x1, double x2) {
  double cum = 0.0, best = 0.0;
  std::size_t k = 0;
  for (std::size_t r = 0; r < nd.R.size(); ++r) {
    for (; k < nd.segment_end[r]; ++k) cum += nd.w[k] * std::abs(f(x1 - nd.t[k], x2 - nd.d2[k]));
    best = std::max(best, cum / nd.R[r]);
  }
  return best;
}

SampledField2D max_op(const HomogeneousCurve& curve, double u, const SampledField2D& f, const MaxOpOptions& opt);

enum class FamilyKind { average, hilbert };

/// Pointwise max over u of max_op or |hilbert_op|. Options default to the
/// R grid admissible for the largest u and to default_truncation.
SampledField2D family_max(const HomogeneousCurve& curve, std::span<const double> us, const SampledField2D& f,
                          FamilyKind kind, const QuadratureScheme& q,
                          std::optional<MaxOpOptions> opt = std::nullopt, std::optional<int> J = std::nullopt);

/// Rectangle half-widths, in cells, used by strong_max: 0,1,2,3,4,6,8,12,...
/// up to n/4.
[[nodiscard]] std::vector<std::size_t> strong_max_half_widths(std::size_t n);

/// Sup over centered axis-parallel rectangles (half-widths from
/// strong_max_half_widths in each axis) of the average of |f|.
SampledField2D strong_max(const SampledField2D& f);

}  // namespace curvemax
