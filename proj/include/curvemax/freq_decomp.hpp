#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "curvemax/curve_measures.hpp"
#include "curvemax/fourier.hpp"
#include "curvemax/symbols.hpp"

namespace curvemax {

enum class PieceKind { A, T_plus, T_minus, S, A0, P1, P2 };

/// A translation-invariant piece of the decomposition. Multipliers are read
/// at eta = (2^{-j} xi1, 2^{-jb} u xi2).
struct OperatorPiece {
  PieceKind kind = PieceKind::A;
  int j = 0;      // level; lowest level for S
  int j_max = 0;  // S only
  int ell = 0;
  int k = 0;      // k1 for P1, k2 for P2
  double u = 1.0;

  static OperatorPiece A(int j, int ell, double u) { return {PieceKind::A, j, j, ell, 0, u}; }
  static OperatorPiece T(int j, int ell, int sign, double u) {
    return {sign > 0 ? PieceKind::T_plus : PieceKind::T_minus, j, j, ell, 0, u};
  }
  static OperatorPiece A0(int j, double u) { return {PieceKind::A0, j, j, 0, 0, u}; }
  static OperatorPiece S(int j_min, int j_max, double u) { return {PieceKind::S, j_min, j_max, 0, 0, u}; }
  static OperatorPiece P1(int k1, int ell) { return {PieceKind::P1, 0, 0, ell, k1, 1.0}; }
  static OperatorPiece P2(int k2, int ell) { return {PieceKind::P2, 0, 0, ell, k2, 1.0}; }

  [[nodiscard]] std::string label() const;
};

/// Piece multipliers sampled at the exact frequencies of one periodic grid.
/// Symbol grids are cached per (kind, j, u); the bank is safe to share.
class MultiplierBank {
 public:
  MultiplierBank(const HomogeneousCurve& curve, std::size_t n, double L);

  [[nodiscard]] const HomogeneousCurve& curve() const { return curve_; }
  [[nodiscard]] const CutoffBank& cutoffs() const { return bank_; }
  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] double L() const { return L_; }
  [[nodiscard]] const std::vector<double>& frequencies() const { return xi_; }

  [[nodiscard]] Spectrum multiplier(const OperatorPiece& piece) const;
  /// Symbol of `kind` at the anisotropically scaled grid frequencies.
  [[nodiscard]] std::shared_ptr<const Spectrum> scaled_symbol(SymbolKind kind, int j, double u) const;

 private:
  HomogeneousCurve curve_;
  CutoffBank bank_;
  std::size_t n_;
  double L_;
  std::vector<double> xi_;
  mutable std::mutex mu_;
  mutable std::map<std::tuple<int, int, double>, std::shared_ptr<const Spectrum>> cache_;
};

[[nodiscard]] double grid_sup(const Spectrum& m);

SampledField2D apply_piece(const MultiplierBank& bank, const OperatorPiece& piece, const SampledField2D& f);

/// Real field with Gaussian spectrum on the grid frequencies |xi| <= band.
SampledField2D random_band_limited_field(std::size_t n, double L, double band, std::uint64_t seed);

struct ReproductionReport {
  double rel_error = 0.0;
  bool exact_zero = false;  // A f vanishes identically; rel_error is then 0
  double a_norm = 0.0;
};

/// || A f - P1_{j,l} P2_{j-n,l,b} A f ||_2 / || A f ||_2 with A = A_{j,l}^{2^{bn} s}.
ReproductionReport reproduction_check(const MultiplierBank& bank, int j, int ell, int n_shell, double s,
                                      const SampledField2D& f);

/// Re sum_m c_m e^{i xi_m . x}: an exactly evaluable, band-limited source.
struct TrigPolynomial {
  struct Mode {
    double xi1 = 0.0, xi2 = 0.0;
    std::complex<double> c;
  };
  std::vector<Mode> modes;

  double operator()(double x1, double x2) const;
  [[nodiscard]] SampledField2D sample(std::size_t n, double L) const;
  [[nodiscard]] double max_frequency() const;

  /// `count` modes at distinct grid frequencies with band_lo <= |xi| <= band_hi.
  static TrigPolynomial random(std::size_t n, double L, std::size_t count, double band_lo, double band_hi,
                               std::uint64_t seed);
  static TrigPolynomial constant(double value);
};

/// Two independent routes to the same operator: spatial quadrature on the
/// exact source versus the sum of FFT multiplier pieces, compared on the
/// sub-lattice of grid points with index step `stride`.
struct DecompositionReport {
  double rel_error = 0.0;
  double spatial_norm = 0.0;
  double multiplier_norm = 0.0;
  double source_norm = 0.0;
  std::size_t points = 0;
  int j_min = 0, j_max = 0;
  int ell_max = 0;
};

/// tau_j^u * f against sum_{l=0}^{ell_max} A_{j,l}^u f, relative to ||f||.
DecompositionReport tau_decomposition_check(const MultiplierBank& bank, int j, double u, const TrigPolynomial& f,
                                            int ell_max, const QuadratureScheme& q, std::size_t stride);

/// Truncated H^(u) f against S^(u) f + sum_{+-} sum_{l=1}^{ell_max} sum_j T_{j,l,+-}^u f
/// over the same levels, relative to ||f||.
DecompositionReport hilbert_decomposition_check(const MultiplierBank& bank, double u, const TrigPolynomial& f,
                                                std::optional<int> J, int ell_max, const QuadratureScheme& q,
                                                std::size_t stride);

struct DominationReport {
  std::vector<double> ratios;  // per field: max |A f| / (eps + M^str(tau * |f|))
  double batch_max = 0.0;
  double batch_min = 0.0;
};

DominationReport pointwise_domination_report(const MultiplierBank& bank, int j, int ell, double u,
                                             std::span<const SampledField2D> batch, const QuadratureScheme& q,
                                             double eps = 1e-12);

/// The same report for several ell at once; the dominating side is shared.
std::vector<DominationReport> pointwise_domination_sweep(const MultiplierBank& bank, int j, std::span<const int> ells,
                                                         double u, std::span<const SampledField2D> batch,
                                                         const QuadratureScheme& q, double eps = 1e-12);

/// sum_{k1,k2} ||P1_{k1,l} P2_{k2,l} f||^2 / ||f||^2 together with the
/// multiplier overlap bound max_xi sum |chi1 chi2|^2 it must respect.
struct LittlewoodPaleyReport {
  double energy_ratio = 0.0;
  double overlap_bound = 0.0;
};
LittlewoodPaleyReport littlewood_paley_energy(const MultiplierBank& bank, int ell, const SampledField2D& f);

void write_symbol_csv(std::ostream& os, const MeasureSymbol& symbol, std::span<const std::pair<double, double>> points);

struct NormSweepRow {
  int j = 0;
  int ell = 0;
  double u = 1.0;
  double sup_abs = 0.0;
};
void write_norm_sweep_csv(std::ostream& os, std::span<const NormSweepRow> rows);

}  // namespace curvemax
