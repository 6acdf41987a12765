#pragma once

#include <complex>
#include <span>
#include <string_view>
#include <vector>

#include "curvemax/cutoffs.hpp"

namespace curvemax {

enum class SymbolKind {
  tau0_hat,
  sigma_plus_hat,
  sigma_minus_hat,
  rho0_hat,
  mu0_plus_hat,
  mu0_minus_hat,
  phi0_hat,     // smooth part of the Hilbert kernel
  varphi0_hat,  // smooth part of the averaging kernel
};

[[nodiscard]] std::string_view to_string(SymbolKind k);
[[nodiscard]] SymbolKind parse_symbol_kind(std::string_view name);

struct SymbolValue {
  std::complex<double> value;
  double error_estimate = 0.0;  // |I(2P panels) - I(P panels)| of the oscillatory integrals
  bool flagged = false;         // error_estimate above the tolerance
  int panels = 0;
};

/// Fourier transforms of the measures tau_0, sigma_+-, and of the pieces
/// obtained by dressing them with eta0 and the sigma cuts, with the
/// convention  mu^(xi) = int e^{-i xi.y} dmu(y).
class MeasureSymbol {
 public:
  MeasureSymbol(const HomogeneousCurve& curve, SymbolKind kind, double tolerance = 1e-10);

  [[nodiscard]] SymbolKind kind() const { return kind_; }
  [[nodiscard]] const CutoffBank& bank() const { return bank_; }

  /// Adaptive evaluation: composite 16-point Gauss-Legendre panels on
  /// [1/2, 2], panel count from the phase variation, error by doubling.
  [[nodiscard]] SymbolValue evaluate(double xi1, double xi2) const;

  /// Values on the tensor grid eta1 x eta2 (row-major in eta1), with one
  /// panel count sized for the largest phase on the grid. Entries where
  /// `need` is false are left at zero.
  [[nodiscard]] std::vector<std::complex<double>> grid(std::span<const double> eta1, std::span<const double> eta2,
                                                       const std::vector<char>* need = nullptr) const;

 private:
  HomogeneousCurve curve_;
  SymbolKind kind_;
  double tol_;
  CutoffBank bank_;
};

/// One-shot evaluation.
[[nodiscard]] SymbolValue fourier_measure(const HomogeneousCurve& curve, SymbolKind kind, double xi1, double xi2);

/// The raw oscillatory integrals behind every symbol.
enum class BaseIntegral { tau, sigma_plus, sigma_minus };

/// Panel count used for phase variation `phase` (power of two, at least 16).
[[nodiscard]] int panels_for_phase(double phase);
[[nodiscard]] double phase_variation(const HomogeneousCurve& curve, BaseIntegral which, double xi1, double xi2);

[[nodiscard]] std::complex<double> base_integral(const HomogeneousCurve& curve, BaseIntegral which, double xi1,
                                                 double xi2, int panels);

/// Tensor-grid evaluation of a base integral, at a fixed panel count.
[[nodiscard]] std::vector<std::complex<double>> base_integral_grid(const HomogeneousCurve& curve, BaseIntegral which,
                                                                   std::span<const double> eta1,
                                                                   std::span<const double> eta2, int panels,
                                                                   const std::vector<char>* need = nullptr);

/// The dressing factors: value = sum_k coefficient_k * base_k.
struct Dressing {
  double tau = 0.0;
  double sigma_plus = 0.0;
  double sigma_minus = 0.0;
};
[[nodiscard]] Dressing dressing(const CutoffBank& bank, SymbolKind kind, double xi1, double xi2);

}  // namespace curvemax
