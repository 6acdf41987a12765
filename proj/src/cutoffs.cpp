#include "curvemax/cutoffs.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>

namespace curvemax {

void HomogeneousCurve::validate() const {
  if (!(b > 1.0) || !std::isfinite(b)) throw ParameterError("curve exponent b must exceed 1");
  if (c_plus == 0.0 || c_minus == 0.0 || !std::isfinite(c_plus) || !std::isfinite(c_minus))
    throw ParameterError("curve coefficients c_plus, c_minus must be finite and nonzero");
}

double HomogeneousCurve::max_abs_c() const { return std::max(std::abs(c_plus), std::abs(c_minus)); }

double curve_eval(const HomogeneousCurve& curve, double t) {
  if (t > 0.0) return curve.c_plus * std::pow(t, curve.b);
  if (t < 0.0) return curve.c_minus * std::pow(-t, curve.b);
  return 0.0;
}

namespace cutoffs {

namespace {

double psi(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double beta(double t) { return psi(t - 0.5) * psi(2.0 - t); }

}  // namespace

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = psi(x), b = psi(1.0 - x);
  return a / (a + b);
}

double plateau_bump(double x, double a, double c, double d, double b) {
  if (x <= a || x >= b) return 0.0;
  if (x >= c && x <= d) return 1.0;
  if (x < c) return smooth_step((x - a) / (c - a));
  return smooth_step((b - x) / (b - d));
}

double chi_plus(double t) {
  if (!(t > 0.5 && t < 2.0)) return 0.0;
  double total = 0.0;
  for (int j = -2; j <= 2; ++j) total += beta(std::ldexp(t, j));
  return beta(t) / total;
}

double chi_plus_mass() {
  static const double mass = [] {
    std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
        gsl_integration_glfixed_table_alloc(64), &gsl_integration_glfixed_table_free);
    gsl_function f;
    f.function = [](double t, void*) { return chi_plus(t); };
    f.params = nullptr;
    double sum = 0.0;
    const int panels = 64;
    for (int k = 0; k < panels; ++k) {
      const double a = 0.5 + 1.5 * k / panels, b = 0.5 + 1.5 * (k + 1) / panels;
      sum += gsl_integration_glfixed(&f, a, b, table.get());
    }
    return sum;
  }();
  return mass;
}

}  // namespace cutoffs

CutoffBank::CutoffBank(const HomogeneousCurve& curve) : curve_(curve) {
  curve_.validate();
  const double b = curve_.b;
  sp_[0] = b * std::pow(0.25, b - 1.0);
  sp_[1] = b * std::pow(2.0 / 7.0, b - 1.0);
  sp_[2] = b * std::pow(3.5, b - 1.0);
  sp_[3] = b * std::pow(4.0, b - 1.0);
  const double base1 = std::abs(curve_.c_plus) * b;
  c1_[0] = base1 * std::pow(2.0, -3.0 * b - 1.0);
  c1_[1] = base1 * std::pow(2.0, -3.0 * b);
  c1_[2] = base1 * std::pow(2.0, 3.0 * b);
  c1_[3] = base1 * std::pow(2.0, 3.0 * b + 1.0);
  c2_[0] = std::pow(2.0, -2.0 * b - 1.0);
  c2_[1] = std::pow(2.0, -2.0 * b);
  c2_[2] = std::pow(2.0, 2.0 * b);
  c2_[3] = std::pow(2.0, 2.0 * b + 1.0);
}

double CutoffBank::eta0(double xi1, double xi2) const {
  return cutoffs::smooth_step((100.0 - std::hypot(xi1, xi2)) / 50.0);
}

double CutoffBank::sigma_plus_cut(double x) const {
  return cutoffs::plateau_bump(x, sp_[0], sp_[1], sp_[2], sp_[3]);
}

double CutoffBank::zeta0(double xi1, double xi2) const {
  return cutoffs::smooth_step((2.0 - std::hypot(xi1, xi2)) / 0.75);
}

double CutoffBank::zeta(int ell, double xi1, double xi2) const {
  if (ell < 0) throw ParameterError("zeta index must be nonnegative");
  if (ell == 0) return zeta0(xi1, xi2);
  return zeta0(std::ldexp(xi1, -ell), std::ldexp(xi2, -ell)) -
         zeta0(std::ldexp(xi1, 1 - ell), std::ldexp(xi2, 1 - ell));
}

double CutoffBank::chi1(double xi1) const {
  return cutoffs::plateau_bump(std::abs(xi1), c1_[0], c1_[1], c1_[2], c1_[3]);
}

double CutoffBank::chi2(double xi2) const {
  return cutoffs::plateau_bump(std::abs(xi2), c2_[0], c2_[1], c2_[2], c2_[3]);
}

double CutoffBank::eval(std::string_view name, double x1, double x2) const {
  if (name == "chi_plus") return cutoffs::chi_plus(x1);
  if (name == "chi_minus") return cutoffs::chi_minus(x1);
  if (name == "chi") return cutoffs::chi(x1);
  if (name == "eta0") return eta0(x1, x2);
  if (name == "zeta0") return zeta0(x1, x2);
  if (name == "sigma_plus_cut") return sigma_plus_cut(x1);
  if (name == "sigma_minus_cut") return sigma_minus_cut(x1);
  if (name == "chi1") return chi1(x1);
  if (name == "chi2") return chi2(x1);
  if (name.starts_with("zeta_")) {
    const std::string digits(name.substr(5));
    if (!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos && digits.size() < 4)
      return zeta(std::stoi(digits), x1, x2);
  }
  throw ParameterError("unknown cutoff '" + std::string(name) + "'");
}

std::vector<std::string> CutoffBank::names() {
  return {"chi_plus", "chi_minus", "chi", "eta0", "zeta0", "zeta_<ell>",
          "sigma_plus_cut", "sigma_minus_cut", "chi1", "chi2"};
}

std::vector<double> CutoffBank::sigma_plus_knots() const { return {sp_[0], sp_[1], sp_[2], sp_[3]}; }
std::vector<double> CutoffBank::chi1_knots() const { return {c1_[0], c1_[1], c1_[2], c1_[3]}; }
std::vector<double> CutoffBank::chi2_knots() const { return {c2_[0], c2_[1], c2_[2], c2_[3]}; }

}  // namespace curvemax
