#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "curvemax/common.hpp"

namespace curvemax {

/// Parameters of t -> (t, gamma_b(t)) with gamma_b(t) = c_plus t^b for t > 0
/// and c_minus (-t)^b for t < 0.
struct HomogeneousCurve {
  double b = 2.0;
  double c_plus = 1.0;
  double c_minus = 1.0;

  void validate() const;
  [[nodiscard]] double max_abs_c() const;
};

[[nodiscard]] double curve_eval(const HomogeneousCurve& curve, double t);

namespace cutoffs {

/// 0 on (-inf, 0], 1 on [1, inf), C-infinity in between.
[[nodiscard]] double smooth_step(double x);
/// 1 on [c, d], 0 outside (a, b), smooth ramps between.
[[nodiscard]] double plateau_bump(double x, double a, double c, double d, double b);

/// Dyadic partition element: support (1/2, 2), sum_j chi_plus(2^j t) = 1 on t > 0.
[[nodiscard]] double chi_plus(double t);
[[nodiscard]] inline double chi_minus(double t) { return chi_plus(-t); }
[[nodiscard]] inline double chi(double t) { return chi_plus(t) + chi_plus(-t); }
/// Integral of chi_plus over (0, inf).
[[nodiscard]] double chi_plus_mass();

}  // namespace cutoffs

/// The smooth cutoffs attached to one curve. Immutable after construction.
class CutoffBank {
 public:
  explicit CutoffBank(const HomogeneousCurve& curve);

  [[nodiscard]] const HomogeneousCurve& curve() const { return curve_; }

  [[nodiscard]] double eta0(double xi1, double xi2) const;
  [[nodiscard]] double sigma_plus_cut(double x) const;
  [[nodiscard]] double sigma_minus_cut(double x) const { return sigma_plus_cut(-x); }
  [[nodiscard]] double zeta0(double xi1, double xi2) const;
  [[nodiscard]] double zeta(int ell, double xi1, double xi2) const;
  [[nodiscard]] double chi1(double xi1) const;
  [[nodiscard]] double chi2(double xi2) const;

  /// Named lookup: chi_plus, chi_minus, chi (argument x1), eta0, zeta0,
  /// zeta_<ell> (argument (x1, x2)), sigma_plus_cut, sigma_minus_cut, chi1,
  /// chi2 (argument x1). Unknown names raise ParameterError.
  [[nodiscard]] double eval(std::string_view name, double x1, double x2 = 0.0) const;
  [[nodiscard]] static std::vector<std::string> names();

  /// Support and plateau of sigma_plus_cut: {lo, plateau_lo, plateau_hi, hi}.
  [[nodiscard]] std::vector<double> sigma_plus_knots() const;
  [[nodiscard]] std::vector<double> chi1_knots() const;
  [[nodiscard]] std::vector<double> chi2_knots() const;

 private:
  HomogeneousCurve curve_;
  double sp_[4];
  double c1_[4];
  double c2_[4];
};

}  // namespace curvemax
