#include "curvemax/freq_decomp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace curvemax {

std::string OperatorPiece::label() const {
  auto num = [](double v) { return format_number(v); };
  switch (kind) {
    case PieceKind::A: return "A(j=" + std::to_string(j) + ",ell=" + std::to_string(ell) + ",u=" + num(u) + ")";
    case PieceKind::T_plus: return "T+(j=" + std::to_string(j) + ",ell=" + std::to_string(ell) + ",u=" + num(u) + ")";
    case PieceKind::T_minus: return "T-(j=" + std::to_string(j) + ",ell=" + std::to_string(ell) + ",u=" + num(u) + ")";
    case PieceKind::S: return "S(j=" + std::to_string(j) + ".." + std::to_string(j_max) + ",u=" + num(u) + ")";
    case PieceKind::A0: return "A0(j=" + std::to_string(j) + ",u=" + num(u) + ")";
    case PieceKind::P1: return "P1(k1=" + std::to_string(k) + ",ell=" + std::to_string(ell) + ")";
    case PieceKind::P2: return "P2(k2=" + std::to_string(k) + ",ell=" + std::to_string(ell) + ")";
  }
  return "?";
}

MultiplierBank::MultiplierBank(const HomogeneousCurve& curve, std::size_t n, double L)
    : curve_(curve), bank_(curve), n_(n), L_(L), xi_(grid_frequencies(n, L)) {
  if (n < 2 || !(L > 0.0)) throw ParameterError("multiplier grid needs n >= 2 and L > 0");
}

std::shared_ptr<const Spectrum> MultiplierBank::scaled_symbol(SymbolKind kind, int j, double u) const {
  if (!(u > 0.0)) throw ParameterError("dilation parameter u must be positive");
  const auto key = std::make_tuple(static_cast<int>(kind), j, u);
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  std::vector<double> eta1(n_), eta2(n_);
  const double s1 = std::ldexp(1.0, -j), s2 = u * std::pow(2.0, -j * curve_.b);
  for (std::size_t k = 0; k < n_; ++k) {
    eta1[k] = s1 * xi_[k];
    eta2[k] = s2 * xi_[k];
  }
  auto grid = std::make_shared<const Spectrum>(MeasureSymbol(curve_, kind).grid(eta1, eta2));
  std::lock_guard lock(mu_);
  return cache_.emplace(key, std::move(grid)).first->second;
}

Spectrum MultiplierBank::multiplier(const OperatorPiece& p) const {
  Spectrum m(n_ * n_, 0.0);
  const double s1 = std::ldexp(1.0, -p.j), s2 = p.u * std::pow(2.0, -p.j * curve_.b);
  auto times_zeta = [&](const Spectrum& sym) {
    if (p.ell < 1) throw ParameterError("pieces with a zeta_ell factor need ell >= 1");
    for (std::size_t k1 = 0; k1 < n_; ++k1)
      for (std::size_t k2 = 0; k2 < n_; ++k2) {
        const std::size_t i = k1 * n_ + k2;
        if (sym[i] == 0.0) continue;
        const double z = bank_.zeta(p.ell, s1 * xi_[k1], s2 * xi_[k2]);
        if (z != 0.0) m[i] = z * sym[i];
      }
  };
  switch (p.kind) {
    case PieceKind::A:
      if (p.ell == 0) return *scaled_symbol(SymbolKind::varphi0_hat, p.j, p.u);
      times_zeta(*scaled_symbol(SymbolKind::rho0_hat, p.j, p.u));
      break;
    case PieceKind::T_plus: times_zeta(*scaled_symbol(SymbolKind::mu0_plus_hat, p.j, p.u)); break;
    case PieceKind::T_minus: times_zeta(*scaled_symbol(SymbolKind::mu0_minus_hat, p.j, p.u)); break;
    case PieceKind::A0: return *scaled_symbol(SymbolKind::varphi0_hat, p.j, p.u);
    case PieceKind::S:
      if (p.j_max < p.j) throw ParameterError("S needs j_min <= j_max");
      for (int j = p.j; j <= p.j_max; ++j) {
        const auto sym = scaled_symbol(SymbolKind::phi0_hat, j, p.u);
        if (grid_sup(*sym) < 1e-14) continue;
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += (*sym)[i];
      }
      break;
    case PieceKind::P1:
      for (std::size_t k1 = 0; k1 < n_; ++k1) {
        const double c = bank_.chi1(std::ldexp(xi_[k1], -p.k - p.ell));
        for (std::size_t k2 = 0; k2 < n_; ++k2) m[k1 * n_ + k2] = c;
      }
      break;
    case PieceKind::P2:
      for (std::size_t k2 = 0; k2 < n_; ++k2) {
        const double c = bank_.chi2(xi_[k2] * std::pow(2.0, -p.k * curve_.b - p.ell));
        for (std::size_t k1 = 0; k1 < n_; ++k1) m[k1 * n_ + k2] = c;
      }
      break;
  }
  return m;
}

double grid_sup(const Spectrum& m) {
  double s = 0.0;
  for (const auto& v : m) s = std::max(s, std::abs(v));
  return s;
}

SampledField2D apply_piece(const MultiplierBank& bank, const OperatorPiece& piece, const SampledField2D& f) {
  if (f.n != bank.n() || f.L != bank.L())
    throw GridMismatchError("field grid (n=" + std::to_string(f.n) + ", L=" + format_number(f.L) +
                            ") differs from the multiplier grid (n=" + std::to_string(bank.n()) +
                            ", L=" + format_number(bank.L()) + ")");
  return apply_multiplier(f, bank.multiplier(piece));
}

SampledField2D random_band_limited_field(std::size_t n, double L, double band, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const auto xi = grid_frequencies(n, L);
  Spectrum s(n * n, 0.0);
  for (std::size_t k1 = 0; k1 < n; ++k1)
    for (std::size_t k2 = 0; k2 < n; ++k2) {
      const double a = nd(rng), b = nd(rng);
      if (std::hypot(xi[k1], xi[k2]) <= band) s[k1 * n + k2] = {a, b};
    }
  // Hermitian symmetrization makes the inverse transform real.
  Spectrum h(n * n);
  for (std::size_t k1 = 0; k1 < n; ++k1)
    for (std::size_t k2 = 0; k2 < n; ++k2) {
      const std::size_t m1 = (n - k1) % n, m2 = (n - k2) % n;
      h[k1 * n + k2] = 0.5 * (s[k1 * n + k2] + std::conj(s[m1 * n + m2]));
    }
  return ifft2_real(h, n, L);
}

ReproductionReport reproduction_check(const MultiplierBank& bank, int j, int ell, int n_shell, double s,
                                      const SampledField2D& f) {
  const double b = bank.curve().b;
  if (!(s >= 1.0 && s <= std::pow(2.0, b))) throw ParameterError("s must lie in [1, 2^b]");
  if (ell < 1) throw ParameterError("reproduction needs ell >= 1");
  const double u = std::pow(2.0, b * n_shell) * s;
  const auto a = bank.multiplier(OperatorPiece::A(j, ell, u));
  const auto p1 = bank.multiplier(OperatorPiece::P1(j, ell));
  const auto p2 = bank.multiplier(OperatorPiece::P2(j - n_shell, ell));
  Spectrum pa(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) pa[i] = p1[i] * p2[i] * a[i];
  const auto af = apply_multiplier(f, a);
  const auto paf = apply_multiplier(f, pa);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < af.values.size(); ++i) {
    num += (af.values[i] - paf.values[i]) * (af.values[i] - paf.values[i]);
    den += af.values[i] * af.values[i];
  }
  ReproductionReport r;
  r.a_norm = std::sqrt(den) * f.h();
  r.exact_zero = den == 0.0;
  r.rel_error = r.exact_zero ? 0.0 : std::sqrt(num / den);
  return r;
}

double TrigPolynomial::operator()(double x1, double x2) const {
  double acc = 0.0;
  for (const auto& m : modes) {
    const double ph = m.xi1 * x1 + m.xi2 * x2;
    acc += m.c.real() * std::cos(ph) - m.c.imag() * std::sin(ph);
  }
  return acc;
}

SampledField2D TrigPolynomial::sample(std::size_t n, double L) const {
  return SampledField2D::from_function(n, L, [this](double a, double b) { return (*this)(a, b); });
}

double TrigPolynomial::max_frequency() const {
  double m = 0.0;
  for (const auto& md : modes) m = std::max(m, std::hypot(md.xi1, md.xi2));
  return m;
}

TrigPolynomial TrigPolynomial::random(std::size_t n, double L, std::size_t count, double band_lo, double band_hi,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const auto half = static_cast<std::int64_t>(n / 2) - 1;
  std::uniform_int_distribution<std::int64_t> kd(-half, half);
  const double step = 2.0 * 3.141592653589793238 / L;
  TrigPolynomial p;
  std::set<std::pair<std::int64_t, std::int64_t>> used;
  std::size_t attempts = 0;
  while (p.modes.size() < count) {
    if (++attempts > 1000000) throw ParameterError("frequency band holds too few grid modes");
    const auto k1 = kd(rng), k2 = kd(rng);
    const double r = step * std::hypot(static_cast<double>(k1), static_cast<double>(k2));
    if (r < band_lo || r > band_hi) continue;
    // A mode and its mirror describe the same real function.
    if (used.count({k1, k2}) || used.count({-k1, -k2})) continue;
    used.insert({k1, k2});
    const double re = nd(rng), im = nd(rng);
    p.modes.push_back({step * static_cast<double>(k1), step * static_cast<double>(k2), {re, im}});
  }
  return p;
}

TrigPolynomial TrigPolynomial::constant(double value) { return TrigPolynomial{{{0.0, 0.0, {value, 0.0}}}}; }

namespace {

struct Lattice {
  std::vector<std::pair<std::size_t, std::size_t>> idx;
};

Lattice sub_lattice(std::size_t n, std::size_t stride) {
  if (stride == 0 || stride > n) throw ParameterError("sub-lattice stride must be in [1, n]");
  Lattice l;
  for (std::size_t i1 = 0; i1 < n; i1 += stride)
    for (std::size_t i2 = 0; i2 < n; i2 += stride) l.idx.emplace_back(i1, i2);
  return l;
}

void require_captured(const HomogeneousCurve& c, const TrigPolynomial& f, int j, double u, int ell_max) {
  const double s1 = std::ldexp(1.0, -j), s2 = u * std::pow(2.0, -j * c.b);
  const double cap = 5.0 * std::ldexp(1.0, ell_max - 2);
  for (const auto& m : f.modes)
    if (std::hypot(s1 * m.xi1, s2 * m.xi2) > cap)
      throw ParameterError("ell_max=" + std::to_string(ell_max) + " does not capture the spectrum at level j=" +
                           std::to_string(j));
}

template <class Spatial>
DecompositionReport compare(const SampledField2D& via_multipliers, const TrigPolynomial& f, std::size_t stride,
                            Spatial spatial) {
  const auto lat = sub_lattice(via_multipliers.n, stride);
  std::vector<double> sp(lat.idx.size());
  parallel_for(lat.idx.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      sp[i] = spatial(via_multipliers.coord(lat.idx[i].first), via_multipliers.coord(lat.idx[i].second));
  });
  double diff = 0.0, ns = 0.0, nm = 0.0, nf = 0.0;
  for (std::size_t i = 0; i < lat.idx.size(); ++i) {
    const auto [i1, i2] = lat.idx[i];
    const double m = via_multipliers.at(i1, i2);
    const double fv = f(via_multipliers.coord(i1), via_multipliers.coord(i2));
    diff += (sp[i] - m) * (sp[i] - m);
    ns += sp[i] * sp[i];
    nm += m * m;
    nf += fv * fv;
  }
  DecompositionReport r;
  r.points = lat.idx.size();
  r.spatial_norm = std::sqrt(ns / r.points);
  r.multiplier_norm = std::sqrt(nm / r.points);
  r.source_norm = std::sqrt(nf / r.points);
  r.rel_error = nf > 0.0 ? std::sqrt(diff / nf) : std::sqrt(diff);
  return r;
}

}  // namespace

DecompositionReport tau_decomposition_check(const MultiplierBank& bank, int j, double u, const TrigPolynomial& f,
                                            int ell_max, const QuadratureScheme& q, std::size_t stride) {
  const auto& c = bank.curve();
  check_reach(c, j, u, bank.L(), false);
  if (ell_max < 0) throw ParameterError("ell_max must be nonnegative");
  require_captured(c, f, j, u, ell_max);
  Spectrum m(bank.n() * bank.n(), 0.0);
  for (int ell = 0; ell <= ell_max; ++ell) {
    const auto piece = bank.multiplier(OperatorPiece::A(j, ell, u));
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += piece[i];
  }
  const auto via = apply_multiplier(f.sample(bank.n(), bank.L()), m);
  const auto nodes = tau_nodes(c, j, u, q);
  auto r = compare(via, f, stride, [&](double x1, double x2) { return tau_at(nodes, f, x1, x2); });
  r.j_min = r.j_max = j;
  r.ell_max = ell_max;
  return r;
}

DecompositionReport hilbert_decomposition_check(const MultiplierBank& bank, double u, const TrigPolynomial& f,
                                                std::optional<int> J, int ell_max, const QuadratureScheme& q,
                                                std::size_t stride) {
  const auto& c = bank.curve();
  const int jj = J.value_or(default_truncation(bank.L() / static_cast<double>(bank.n())));
  const int j_min = std::max(-jj, min_admissible_j(c, u, bank.L(), true));
  if (j_min > jj) throw ReachError("no admissible level in [-J, J]");
  if (ell_max < 1) throw ParameterError("ell_max must be at least 1");
  for (int j = j_min; j <= jj; ++j) require_captured(c, f, j, u, ell_max);

  auto m = bank.multiplier(OperatorPiece::S(j_min, jj, u));
  for (int j = j_min; j <= jj; ++j)
    for (int sign : {1, -1})
      for (int ell = 1; ell <= ell_max; ++ell) {
        const auto piece = bank.multiplier(OperatorPiece::T(j, ell, sign, u));
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += piece[i];
      }
  const auto via = apply_multiplier(f.sample(bank.n(), bank.L()), m);
  std::vector<BlockNodes> levels;
  for (int j = j_min; j <= jj; ++j) levels.push_back(sigma_nodes(c, j, u, q));
  auto r = compare(via, f, stride, [&](double x1, double x2) { return hilbert_at(levels, f, x1, x2); });
  r.j_min = j_min;
  r.j_max = jj;
  r.ell_max = ell_max;
  return r;
}

std::vector<DominationReport> pointwise_domination_sweep(const MultiplierBank& bank, int j, std::span<const int> ells,
                                                         double u, std::span<const SampledField2D> batch,
                                                         const QuadratureScheme& q, double eps) {
  if (batch.empty()) throw ParameterError("domination report needs a nonempty batch");
  std::vector<Spectrum> mults;
  for (int ell : ells) mults.push_back(bank.multiplier(OperatorPiece::A(j, ell, u)));
  std::vector<DominationReport> out(ells.size());
  for (const auto& f : batch) {
    if (f.max_abs() == 0.0) throw ParameterError("domination report needs nonzero fields");
    SampledField2D absf = f;
    for (auto& v : absf.values) v = std::abs(v);
    const auto dom = strong_max(tau_convolve(bank.curve(), j, u, absf, q));
    for (std::size_t k = 0; k < ells.size(); ++k) {
      const auto af = apply_multiplier(f, mults[k]);
      double worst = 0.0;
      for (std::size_t i = 0; i < af.values.size(); ++i)
        worst = std::max(worst, std::abs(af.values[i]) / (eps + dom.values[i]));
      out[k].ratios.push_back(worst);
    }
  }
  for (auto& r : out) {
    r.batch_max = *std::max_element(r.ratios.begin(), r.ratios.end());
    r.batch_min = *std::min_element(r.ratios.begin(), r.ratios.end());
  }
  return out;
}

DominationReport pointwise_domination_report(const MultiplierBank& bank, int j, int ell, double u,
                                             std::span<const SampledField2D> batch, const QuadratureScheme& q,
                                             double eps) {
  const int ells[] = {ell};
  return pointwise_domination_sweep(bank, j, ells, u, batch, q, eps).front();
}

LittlewoodPaleyReport littlewood_paley_energy(const MultiplierBank& bank, int ell, const SampledField2D& f) {
  if (f.n != bank.n() || f.L != bank.L()) throw GridMismatchError("field and multiplier grids differ");
  const auto& xi = bank.frequencies();
  const std::size_t n = bank.n();
  const double b = bank.curve().b;
  const auto k1s = bank.cutoffs().chi1_knots(), k2s = bank.cutoffs().chi2_knots();
  const double xmin = std::abs(xi[1]), xmax = std::abs(xi[n / 2]);
  const int k1_lo = static_cast<int>(std::floor(std::log2(xmin / k1s[3]))) - ell - 1;
  const int k1_hi = static_cast<int>(std::ceil(std::log2(xmax / k1s[0]))) - ell + 1;
  const int k2_lo = static_cast<int>(std::floor((std::log2(xmin / k2s[3]) - ell) / b)) - 1;
  const int k2_hi = static_cast<int>(std::ceil((std::log2(xmax / k2s[0]) - ell) / b)) + 1;
  // The product structure lets each axis be summed on its own.
  std::vector<double> s1(n, 0.0), s2(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (int k1 = k1_lo; k1 <= k1_hi; ++k1) s1[k] += std::pow(bank.cutoffs().chi1(std::ldexp(xi[k], -k1 - ell)), 2);
    for (int k2 = k2_lo; k2 <= k2_hi; ++k2)
      s2[k] += std::pow(bank.cutoffs().chi2(xi[k] * std::pow(2.0, -k2 * b - ell)), 2);
  }
  const auto F = fft2(f);
  double num = 0.0, den = 0.0, bound = 0.0;
  for (std::size_t k1 = 0; k1 < n; ++k1)
    for (std::size_t k2 = 0; k2 < n; ++k2) {
      const double w = s1[k1] * s2[k2];
      const double e = std::norm(F[k1 * n + k2]);
      num += w * e;
      den += e;
      bound = std::max(bound, w);
    }
  return {den > 0.0 ? num / den : 0.0, bound};
}

void write_symbol_csv(std::ostream& os, const MeasureSymbol& symbol, std::span<const std::pair<double, double>> points) {
  os << "xi1,xi2,re,im\n";
  for (const auto& [a, b] : points) {
    const auto v = symbol.evaluate(a, b).value;
    os << format_number(a) << ',' << format_number(b) << ',' << format_number(v.real()) << ','
       << format_number(v.imag()) << '\n';
  }
}

void write_norm_sweep_csv(std::ostream& os, std::span<const NormSweepRow> rows) {
  os << "j,ell,u,sup_abs\n";
  for (const auto& r : rows)
    os << r.j << ',' << r.ell << ',' << format_number(r.u) << ',' << format_number(r.sup_abs) << '\n';
}

}  // namespace curvemax
