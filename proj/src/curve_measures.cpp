#include "curvemax/curve_measures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace curvemax {

QuadratureScheme QuadratureScheme::midpoint(int nodes_per_block) {
  if (nodes_per_block < 2) throw ParameterError("quadrature needs at least 2 nodes per block");
  QuadratureScheme q;
  q.nodes_per_block = nodes_per_block;
  const double ds = 1.5 / nodes_per_block;
  for (int k = 0; k < nodes_per_block; ++k) {
    const double s = 0.5 + (k + 0.5) * ds;
    const double c = cutoffs::chi_plus(s);
    if (c <= 0.0) continue;
    q.s.push_back(s);
    q.w_tau.push_back(c * ds);
    q.w_sigma.push_back(c * ds / s);
  }
  return q;
}

Reach kernel_reach(const HomogeneousCurve& curve, int j, double u, bool two_sided) {
  const double c = two_sided ? curve.max_abs_c() : std::abs(curve.c_plus);
  const double t = std::ldexp(1.0, 1 - j);
  return {t, u * c * std::pow(t, curve.b)};
}

void check_reach(const HomogeneousCurve& curve, int j, double u, double L, bool two_sided) {
  const auto r = kernel_reach(curve, j, u, two_sided);
  if (r.x1 > L / 8.0 || r.x2 > L / 8.0)
    throw ReachError("level j=" + std::to_string(j) + " at u=" + format_number(u) + " reaches (" +
                     format_number(r.x1) + ", " + format_number(r.x2) + "), beyond L/8=" + format_number(L / 8.0));
}

int min_admissible_j(const HomogeneousCurve& curve, double u, double L, bool two_sided) {
  const double c = two_sided ? curve.max_abs_c() : std::abs(curve.c_plus);
  const double bound = std::max(1.0 - std::log2(L / 8.0), 1.0 - std::log2(L / (8.0 * u * c)) / curve.b);
  auto j = static_cast<int>(std::ceil(bound)) - 1;
  auto fits = [&](int jj) {
    const auto r = kernel_reach(curve, jj, u, two_sided);
    return r.x1 <= L / 8.0 && r.x2 <= L / 8.0;
  };
  while (!fits(j)) ++j;
  while (fits(j - 1)) --j;
  return j;
}

namespace {

BlockNodes block_nodes(const HomogeneousCurve& curve, int j, double u, const QuadratureScheme& q, bool sigma) {
  curve.validate();
  if (!(u > 0.0)) throw ParameterError("dilation parameter u must be positive");
  BlockNodes nd;
  const double scale = std::ldexp(1.0, -j);
  const double scale_b = std::pow(scale, curve.b);
  const std::size_t m = q.s.size();
  nd.d1_plus.resize(m);
  nd.d2_plus.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double sb = std::pow(q.s[k], curve.b);
    nd.d1_plus[k] = scale * q.s[k];
    nd.d2_plus[k] = u * curve.c_plus * scale_b * sb;
    if (sigma) {
      nd.d1_minus.push_back(-scale * q.s[k]);
      nd.d2_minus.push_back(u * curve.c_minus * scale_b * sb);
    }
  }
  nd.w = sigma ? q.w_sigma : q.w_tau;
  return nd;
}

template <class Eval>
SampledField2D fill_field(const SampledField2D& like, Eval eval) {
  SampledField2D out(like.n, like.L);
  out.periodic = like.periodic;
  parallel_for(like.n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i1 = b; i1 < e; ++i1) {
      const double x1 = like.coord(i1);
      for (std::size_t i2 = 0; i2 < like.n; ++i2) out.at(i1, i2) = eval(x1, like.coord(i2));
    }
  });
  return out;
}

}  // namespace

BlockNodes tau_nodes(const HomogeneousCurve& curve, int j, double u, const QuadratureScheme& q) {
  return block_nodes(curve, j, u, q, false);
}

BlockNodes sigma_nodes(const HomogeneousCurve& curve, int j, double u, const QuadratureScheme& q) {
  return block_nodes(curve, j, u, q, true);
}

SampledField2D tau_convolve(const HomogeneousCurve& curve, int j, double u, const SampledField2D& f,
                            const QuadratureScheme& q) {
  check_reach(curve, j, u, f.L, false);
  const auto nd = tau_nodes(curve, j, u, q);
  const BilinearSampler src(f);
  return fill_field(f, [&](double x1, double x2) { return tau_at(nd, src, x1, x2); });
}

SampledField2D sigma_convolve(const HomogeneousCurve& curve, int j, double u, const SampledField2D& f,
                              const QuadratureScheme& q) {
  check_reach(curve, j, u, f.L, true);
  const auto nd = sigma_nodes(curve, j, u, q);
  const BilinearSampler src(f);
  return fill_field(f, [&](double x1, double x2) { return sigma_at(nd, src, x1, x2); });
}

EstimatedField tau_convolve_estimated(const HomogeneousCurve& curve, int j, double u, const SampledField2D& f,
                                      const QuadratureScheme& q) {
  if (q.nodes_per_block < 4) throw ParameterError("error estimate needs at least 4 nodes per block");
  EstimatedField out{tau_convolve(curve, j, u, f, q), 0.0};
  const auto coarse = tau_convolve(curve, j, u, f, QuadratureScheme::midpoint(q.nodes_per_block / 2));
  for (std::size_t i = 0; i < coarse.values.size(); ++i)
    out.error_estimate = std::max(out.error_estimate, std::abs(coarse.values[i] - out.value.values[i]));
  return out;
}

int default_truncation(double h) { return static_cast<int>(std::ceil(3.0 - std::log2(h))); }

HilbertResult hilbert_op(const HomogeneousCurve& curve, double u, const SampledField2D& f,
                         std::optional<int> J, const QuadratureScheme& q) {
  const int jj = J.value_or(default_truncation(f.h()));
  if (jj < 0) throw ParameterError("truncation J must be nonnegative");
  const int j_reach = min_admissible_j(curve, u, f.L, true);
  HilbertResult r;
  r.j_min = std::max(-jj, j_reach);
  r.j_max = jj;
  if (r.j_min > r.j_max)
    throw ReachError("no level in [-J, J] fits the grid; smallest admissible j=" + std::to_string(j_reach));
  r.clipped_by_reach = r.j_min - (-jj);
  r.kernel_t_min = std::ldexp(1.0, -r.j_max - 1);
  r.kernel_t_max = std::ldexp(1.0, 1 - r.j_min);

  std::vector<BlockNodes> levels;
  for (int j = r.j_min; j <= r.j_max; ++j) levels.push_back(sigma_nodes(curve, j, u, q));
  const BilinearSampler src(f);
  r.field = fill_field(f, [&](double x1, double x2) { return hilbert_at(levels, src, x1, x2); });
  return r;
}

std::vector<double> default_R_grid(const HomogeneousCurve& curve, double u, double h, double L) {
  std::vector<double> R;
  for (int k = 0;; ++k) {
    const double r = std::exp2(k / 4.0) * h;
    if (r > L / 8.0 || u * std::abs(curve.c_plus) * std::pow(r, curve.b) > L / 8.0) break;
    R.push_back(r);
  }
  return R;
}

MaxNodes max_nodes(const HomogeneousCurve& curve, double u, const MaxOpOptions& opt) {
  curve.validate();
  if (opt.R_grid.empty()) throw ParameterError("max_op needs a nonempty R grid");
  if (opt.substeps < 1) throw ParameterError("max_op substeps must be positive");
  if (!(u > 0.0)) throw ParameterError("dilation parameter u must be positive");
  MaxNodes nd;
  nd.R = opt.R_grid;
  std::sort(nd.R.begin(), nd.R.end());
  nd.R.erase(std::unique(nd.R.begin(), nd.R.end()), nd.R.end());
  if (!(nd.R.front() > 0.0)) throw ParameterError("radii must be positive");
  double lo = 0.0;
  for (double r : nd.R) {
    const double dt = (r - lo) / opt.substeps;
    for (int k = 0; k < opt.substeps; ++k) {
      const double t = lo + (k + 0.5) * dt;
      nd.t.push_back(t);
      nd.d2.push_back(u * curve.c_plus * std::pow(t, curve.b));
      nd.w.push_back(dt);
    }
    nd.segment_end.push_back(nd.t.size());
    lo = r;
  }
  return nd;
}

SampledField2D max_op(const HomogeneousCurve& curve, double u, const SampledField2D& f, const MaxOpOptions& opt) {
  const auto nd = max_nodes(curve, u, opt);
  const double R = nd.R.back();
  if (R > f.L / 8.0 || u * std::abs(curve.c_plus) * std::pow(R, curve.b) > f.L / 8.0)
    throw ReachError("max_op radius " + format_number(R) + " at u=" + format_number(u) + " exceeds L/8");
  const BilinearSampler src(f);
  return fill_field(f, [&](double x1, double x2) { return max_at(nd, src, x1, x2); });
}

SampledField2D family_max(const HomogeneousCurve& curve, std::span<const double> us, const SampledField2D& f,
                          FamilyKind kind, const QuadratureScheme& q, std::optional<MaxOpOptions> opt,
                          std::optional<int> J) {
  if (us.empty()) throw ParameterError("family_max needs at least one u");
  const double u_max = *std::max_element(us.begin(), us.end());
  MaxOpOptions options = opt.value_or(MaxOpOptions{default_R_grid(curve, u_max, f.h(), f.L), 8});
  SampledField2D out(f.n, f.L);
  for (double u : us) {
    const auto piece = kind == FamilyKind::average ? max_op(curve, u, f, options) : hilbert_op(curve, u, f, J, q).field;
    for (std::size_t i = 0; i < out.values.size(); ++i)
      out.values[i] = std::max(out.values[i], std::abs(piece.values[i]));
  }
  return out;
}

std::vector<std::size_t> strong_max_half_widths(std::size_t n) {
  std::vector<std::size_t> hw{0};
  for (std::size_t p = 1; p <= n / 4; p *= 2) {
    hw.push_back(p);
    if (p >= 2 && p + p / 2 <= n / 4) hw.push_back(p + p / 2);
  }
  return hw;
}

namespace {

// Periodic centered window sums of half-width a along each contiguous row.
void window_sums(const double* in, double* out, std::size_t n, std::size_t a) {
  for (std::size_t line = 0; line < n; ++line) {
    const double* r = in + line * n;
    double* o = out + line * n;
    double s = 0.0;
    for (std::size_t k = 0; k <= 2 * a; ++k) s += r[(k + n - a % n) % n];
    std::size_t add = (a + 1) % n, drop = (n - a % n) % n;
    for (std::size_t i = 0; i < n; ++i) {
      o[i] = s;
      s += r[add] - r[drop];
      if (++add == n) add = 0;
      if (++drop == n) drop = 0;
    }
  }
}

void transpose(const std::vector<double>& in, std::vector<double>& out, std::size_t n) {
  constexpr std::size_t B = 32;
  for (std::size_t i0 = 0; i0 < n; i0 += B)
    for (std::size_t j0 = 0; j0 < n; j0 += B)
      for (std::size_t i = i0; i < std::min(i0 + B, n); ++i)
        for (std::size_t j = j0; j < std::min(j0 + B, n); ++j) out[j * n + i] = in[i * n + j];
}

}  // namespace

SampledField2D strong_max(const SampledField2D& f) {
  const std::size_t n = f.n;
  const auto hw = strong_max_half_widths(n);
  std::vector<double> absf(f.values.size());
  for (std::size_t i = 0; i < absf.size(); ++i) absf[i] = std::abs(f.values[i]);
  // Sums along x2 for each half-width, stored transposed so the x1 pass is
  // contiguous too.
  std::vector<std::vector<double>> cols(hw.size(), std::vector<double>(absf.size()));
  parallel_for(hw.size(), [&](std::size_t b, std::size_t e) {
    std::vector<double> tmp(absf.size());
    for (std::size_t k = b; k < e; ++k) {
      window_sums(absf.data(), tmp.data(), n, hw[k]);
      transpose(tmp, cols[k], n);
    }
  });
  std::vector<std::vector<double>> partial(hw.size(), std::vector<double>(absf.size(), 0.0));
  parallel_for(hw.size(), [&](std::size_t b, std::size_t e) {
    std::vector<double> tmp(absf.size());
    for (std::size_t k2 = b; k2 < e; ++k2)
      for (std::size_t a1 : hw) {
        window_sums(cols[k2].data(), tmp.data(), n, a1);
        const double inv_area = 1.0 / static_cast<double>((2 * a1 + 1) * (2 * hw[k2] + 1));
        auto& p = partial[k2];
        for (std::size_t i = 0; i < tmp.size(); ++i) p[i] = std::max(p[i], tmp[i] * inv_area);
      }
  });
  std::vector<double> best(absf.size(), 0.0);
  for (const auto& p : partial)
    for (std::size_t i = 0; i < p.size(); ++i) best[i] = std::max(best[i], p[i]);
  SampledField2D out(n, f.L);
  transpose(best, out.values, n);
  return out;
}

}  // namespace curvemax
