#include "curvemax/symbols.hpp"

#include <gsl/gsl_integration.h>

#include <array>
#include <bit>
#include <cmath>
#include <memory>
#include <mutex>
#include <string>

#include "curvemax/common.hpp"

namespace curvemax {

namespace {

constexpr int kGaussPoints = 16;
constexpr int kMaxLevel = 22;

struct PanelRule {
  std::vector<double> s, w_dt, w_dt_over_t;
};

const PanelRule& panel_rule(int panels) {
  static std::array<std::once_flag, kMaxLevel + 1> once;
  static std::array<PanelRule, kMaxLevel + 1> rules;
  const int level = std::countr_zero(static_cast<unsigned>(panels));
  if (panels <= 0 || !std::has_single_bit(static_cast<unsigned>(panels)) || level > kMaxLevel)
    throw ParameterError("panel count must be a power of two up to 2^" + std::to_string(kMaxLevel));
  std::call_once(once[static_cast<std::size_t>(level)], [&] {
    std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
        gsl_integration_glfixed_table_alloc(kGaussPoints), &gsl_integration_glfixed_table_free);
    PanelRule& r = rules[static_cast<std::size_t>(level)];
    const double width = 1.5 / panels;
    for (int p = 0; p < panels; ++p) {
      const double a = 0.5 + p * width;
      for (int i = 0; i < kGaussPoints; ++i) {
        double x = 0.0, w = 0.0;
        gsl_integration_glfixed_point(a, a + width, static_cast<std::size_t>(i), &x, &w, table.get());
        const double c = cutoffs::chi_plus(x);
        if (c == 0.0) continue;
        r.s.push_back(x);
        r.w_dt.push_back(c * w);
        r.w_dt_over_t.push_back(c * w / x);
      }
    }
  });
  return rules[static_cast<std::size_t>(level)];
}

// Phase pieces for the three base integrals, all on s in [1/2, 2]:
//   tau:         e^{-i(xi1 s + xi2 c+ s^b)} ds
//   sigma_plus:  e^{-i(xi1 s + xi2 c+ s^b)} ds / s
//   sigma_minus: -e^{-i(-xi1 s + xi2 c- s^b)} ds / s   (t = -s)
struct BaseShape {
  double sign1;
  double coef;
  double overall;
  bool over_t;
};

BaseShape shape(const HomogeneousCurve& c, BaseIntegral which) {
  switch (which) {
    case BaseIntegral::tau: return {1.0, c.c_plus, 1.0, false};
    case BaseIntegral::sigma_plus: return {1.0, c.c_plus, 1.0, true};
    case BaseIntegral::sigma_minus: return {-1.0, c.c_minus, -1.0, true};
  }
  return {1.0, c.c_plus, 1.0, false};
}

}  // namespace

std::string_view to_string(SymbolKind k) {
  switch (k) {
    case SymbolKind::tau0_hat: return "tau0_hat";
    case SymbolKind::sigma_plus_hat: return "sigma_plus_hat";
    case SymbolKind::sigma_minus_hat: return "sigma_minus_hat";
    case SymbolKind::rho0_hat: return "rho0_hat";
    case SymbolKind::mu0_plus_hat: return "mu0_plus_hat";
    case SymbolKind::mu0_minus_hat: return "mu0_minus_hat";
    case SymbolKind::phi0_hat: return "phi0_hat";
    case SymbolKind::varphi0_hat: return "varphi0_hat";
  }
  return "?";
}

SymbolKind parse_symbol_kind(std::string_view name) {
  for (auto k : {SymbolKind::tau0_hat, SymbolKind::sigma_plus_hat, SymbolKind::sigma_minus_hat, SymbolKind::rho0_hat,
                 SymbolKind::mu0_plus_hat, SymbolKind::mu0_minus_hat, SymbolKind::phi0_hat, SymbolKind::varphi0_hat})
    if (to_string(k) == name) return k;
  throw ParameterError("unknown symbol kind '" + std::string(name) + "'");
}

int panels_for_phase(double phase) {
  int p = 16;
  while (p < (1 << kMaxLevel) && p * 10.0 < phase) p *= 2;
  return p;
}

double phase_variation(const HomogeneousCurve& curve, BaseIntegral which, double xi1, double xi2) {
  const auto sh = shape(curve, which);
  return std::abs(xi1) * 1.5 + std::abs(xi2 * sh.coef) * (std::pow(2.0, curve.b) - std::pow(2.0, -curve.b));
}

std::complex<double> base_integral(const HomogeneousCurve& curve, BaseIntegral which, double xi1, double xi2,
                                   int panels) {
  const auto& rule = panel_rule(panels);
  const auto sh = shape(curve, which);
  const auto& w = sh.over_t ? rule.w_dt_over_t : rule.w_dt;
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < rule.s.size(); ++k) {
    const double ph = sh.sign1 * xi1 * rule.s[k] + xi2 * sh.coef * std::pow(rule.s[k], curve.b);
    re += w[k] * std::cos(ph);
    im -= w[k] * std::sin(ph);
  }
  return sh.overall * std::complex<double>(re, im);
}

std::vector<std::complex<double>> base_integral_grid(const HomogeneousCurve& curve, BaseIntegral which,
                                                     std::span<const double> eta1, std::span<const double> eta2,
                                                     int panels, const std::vector<char>* need) {
  const std::size_t n1 = eta1.size(), n2 = eta2.size();
  if (need && need->size() != n1 * n2) throw GridMismatchError("mask does not match the symbol grid");
  const auto& rule = panel_rule(panels);
  const auto sh = shape(curve, which);
  const auto& w = sh.over_t ? rule.w_dt_over_t : rule.w_dt;
  const std::size_t K = rule.s.size();
  std::vector<double> sb(K);
  for (std::size_t k = 0; k < K; ++k) sb[k] = sh.coef * std::pow(rule.s[k], curve.b);

  // Factorized phase: w_k e^{-i sign1 eta1 s_k} times e^{-i eta2 c s_k^b}.
  std::vector<double> e2re(n2 * K), e2im(n2 * K);
  parallel_for(n2, [&](std::size_t b, std::size_t e) {
    for (std::size_t i2 = b; i2 < e; ++i2)
      for (std::size_t k = 0; k < K; ++k) {
        const double ph = eta2[i2] * sb[k];
        e2re[i2 * K + k] = std::cos(ph);
        e2im[i2 * K + k] = -std::sin(ph);
      }
  });
  std::vector<std::complex<double>> out(n1 * n2);
  parallel_for(n1, [&](std::size_t b, std::size_t e) {
    std::vector<double> are(K), aim(K);
    for (std::size_t i1 = b; i1 < e; ++i1) {
      bool any = need == nullptr;
      for (std::size_t i2 = 0; !any && i2 < n2; ++i2) any = (*need)[i1 * n2 + i2] != 0;
      if (!any) continue;
      for (std::size_t k = 0; k < K; ++k) {
        const double ph = sh.sign1 * eta1[i1] * rule.s[k];
        are[k] = w[k] * std::cos(ph);
        aim[k] = -w[k] * std::sin(ph);
      }
      for (std::size_t i2 = 0; i2 < n2; ++i2) {
        if (need && !(*need)[i1 * n2 + i2]) continue;
        const double* br = &e2re[i2 * K];
        const double* bi = &e2im[i2 * K];
        double re = 0.0, im = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          re += are[k] * br[k] - aim[k] * bi[k];
          im += are[k] * bi[k] + aim[k] * br[k];
        }
        out[i1 * n2 + i2] = sh.overall * std::complex<double>(re, im);
      }
    }
  });
  return out;
}

Dressing dressing(const CutoffBank& bank, SymbolKind kind, double xi1, double xi2) {
  const auto& c = bank.curve();
  const double eta = bank.eta0(xi1, xi2);
  // xi2 = 0 sends the ratio to infinity, outside both sigma cuts.
  const double cut_minus = xi2 == 0.0 ? 0.0 : bank.sigma_minus_cut(xi1 / (c.c_plus * xi2));
  const double cut_plus = xi2 == 0.0 ? 0.0 : bank.sigma_plus_cut(xi1 / (c.c_minus * xi2));
  switch (kind) {
    case SymbolKind::tau0_hat: return {1.0, 0.0, 0.0};
    case SymbolKind::sigma_plus_hat: return {0.0, 1.0, 0.0};
    case SymbolKind::sigma_minus_hat: return {0.0, 0.0, 1.0};
    case SymbolKind::rho0_hat: return {(1.0 - eta) * cut_minus, 0.0, 0.0};
    case SymbolKind::mu0_plus_hat: return {0.0, (1.0 - eta) * cut_minus, 0.0};
    case SymbolKind::mu0_minus_hat: return {0.0, 0.0, (1.0 - eta) * cut_plus};
    case SymbolKind::phi0_hat:
      return {0.0, eta + (1.0 - eta) * (1.0 - cut_minus), eta + (1.0 - eta) * (1.0 - cut_plus)};
    case SymbolKind::varphi0_hat: return {eta + (1.0 - eta) * (1.0 - cut_minus), 0.0, 0.0};
  }
  return {};
}

MeasureSymbol::MeasureSymbol(const HomogeneousCurve& curve, SymbolKind kind, double tolerance)
    : curve_(curve), kind_(kind), tol_(tolerance), bank_(curve) {}

SymbolValue MeasureSymbol::evaluate(double xi1, double xi2) const {
  if (!std::isfinite(xi1) || !std::isfinite(xi2)) throw ParameterError("symbol argument must be finite");
  const auto d = dressing(bank_, kind_, xi1, xi2);
  SymbolValue out;
  std::complex<double> coarse = 0.0, fine = 0.0;
  int panels = 16;
  auto add = [&](double coef, BaseIntegral which) {
    if (coef == 0.0) return;
    const int p = panels_for_phase(phase_variation(curve_, which, xi1, xi2));
    panels = std::max(panels, p);
    coarse += coef * base_integral(curve_, which, xi1, xi2, p);
    fine += coef * base_integral(curve_, which, xi1, xi2, 2 * p);
  };
  add(d.tau, BaseIntegral::tau);
  add(d.sigma_plus, BaseIntegral::sigma_plus);
  add(d.sigma_minus, BaseIntegral::sigma_minus);
  out.value = fine;
  out.error_estimate = std::abs(fine - coarse);
  out.flagged = out.error_estimate > tol_;
  out.panels = 2 * panels;
  return out;
}

std::vector<std::complex<double>> MeasureSymbol::grid(std::span<const double> eta1, std::span<const double> eta2,
                                                      const std::vector<char>* need) const {
  const std::size_t n1 = eta1.size(), n2 = eta2.size();
  std::vector<Dressing> dress(n1 * n2);
  std::vector<char> mask[3];
  for (auto& m : mask) m.assign(n1 * n2, 0);
  double max1 = 0.0, max2 = 0.0;
  for (double v : eta1) max1 = std::max(max1, std::abs(v));
  for (double v : eta2) max2 = std::max(max2, std::abs(v));
  for (std::size_t i1 = 0; i1 < n1; ++i1)
    for (std::size_t i2 = 0; i2 < n2; ++i2) {
      const std::size_t i = i1 * n2 + i2;
      if (need && !(*need)[i]) continue;
      dress[i] = dressing(bank_, kind_, eta1[i1], eta2[i2]);
      mask[0][i] = dress[i].tau != 0.0;
      mask[1][i] = dress[i].sigma_plus != 0.0;
      mask[2][i] = dress[i].sigma_minus != 0.0;
    }
  std::vector<std::complex<double>> out(n1 * n2, 0.0);
  const BaseIntegral which[3] = {BaseIntegral::tau, BaseIntegral::sigma_plus, BaseIntegral::sigma_minus};
  for (int b = 0; b < 3; ++b) {
    bool any = false;
    for (char m : mask[b]) any = any || m;
    if (!any) continue;
    const int panels = panels_for_phase(phase_variation(curve_, which[b], max1, max2));
    const auto base = base_integral_grid(curve_, which[b], eta1, eta2, panels, &mask[b]);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double c = b == 0 ? dress[i].tau : b == 1 ? dress[i].sigma_plus : dress[i].sigma_minus;
      if (c != 0.0) out[i] += c * base[i];
    }
  }
  return out;
}

SymbolValue fourier_measure(const HomogeneousCurve& curve, SymbolKind kind, double xi1, double xi2) {
  return MeasureSymbol(curve, kind).evaluate(xi1, xi2);
}

}  // namespace curvemax
