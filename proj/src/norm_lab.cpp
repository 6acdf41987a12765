#include "curvemax/norm_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace curvemax {

double eps_b(double b) { return 1.0 / (8.0 * b * std::pow(3.0, b - 1.0)); }

std::vector<double> separated_subset(std::span<const Interval> pieces, double sep) {
  if (!(sep > 0.0)) throw ParameterError("separation must be positive");
  std::vector<double> out;
  double next = -std::numeric_limits<double>::infinity();
  for (const auto& piece : pieces) {
    for (double c = std::max(piece.lo, next); c <= piece.hi; c = std::max(piece.lo, next)) {
      out.push_back(c);
      next = c + sep;
    }
  }
  return out;
}

WitnessPack build_witness(const HomogeneousCurve& curve, const dilation::DilationSet& U, double r, double delta,
                          const WitnessGrid& grid) {
  curve.validate();
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1), got " + format_number(delta));
  if (!(r > 0.0)) throw ParameterError("rescaling r must be positive");
  if (delta < U.resolution_floor())
    throw ParameterError("delta=" + format_number(delta) + " is below the set's resolution floor " +
                         format_number(U.resolution_floor()));
  if (curve.c_plus == 0.0) throw ParameterError("witness needs c_plus != 0");
  const double h = grid.L / static_cast<double>(grid.n);
  if (2.0 * delta / h < 8.0)
    throw ResolutionError("delta=" + format_number(delta) + " spans " + format_number(2.0 * delta / h) +
                          " cells across the ball; at least 8 are needed");

  WitnessPack pack;
  pack.delta = delta;
  pack.r = r;
  pack.b = curve.b;
  pack.eps_b = eps_b(curve.b);
  // Reflection and rescaling of x2 turn c_+ into 1 and u into |c_+| u.
  pack.c_scale = std::abs(curve.c_plus);
  const auto rs = dilation::rescale(U.dilate(pack.c_scale), r, delta);
  pack.covering_count = dilation::covering_number(rs, delta).count;
  pack.f_delta = SampledField2D::from_function(grid.n, grid.L, [delta](double a, double b) {
    return a * a + b * b <= delta * delta ? 1.0 : 0.0;
  });
  if (rs.empty()) {
    pack.warning = "U^r is empty at r=" + format_number(r);
    return pack;
  }
  pack.separated_set = separated_subset(rs.components, std::pow(2.0, curve.b) * delta);
  for (double u : pack.separated_set) pack.tubes.push_back({u, delta / 4.0});

  auto& w = pack.window;
  w.h = h;
  w.cols = static_cast<std::size_t>(std::llround(1.0 / h));
  const double lo = pack.separated_set.front() * std::pow(1.0 - delta, curve.b) - delta - h;
  const double hi = pack.separated_set.back() * std::pow(2.0 + delta, curve.b) + delta + h;
  w.x2_lo = std::floor(lo / h) * h;
  w.rows = static_cast<std::size_t>(std::ceil((hi - w.x2_lo) / h));
  return pack;
}

TubeRasterReport check_tubes(const WitnessPack& pack) {
  TubeRasterReport rep;
  rep.expected_measure = static_cast<double>(pack.tubes.size()) * pack.delta / 2.0;
  const auto& w = pack.window;
  if (pack.tubes.empty()) return rep;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < w.cols; ++i) {
    const double a = 1.0 + static_cast<double>(i) * w.h, c = a + w.h, x1 = w.x1(i);
    std::int64_t prev_touch = std::numeric_limits<std::int64_t>::min();
    std::int64_t prev_in = std::numeric_limits<std::int64_t>::min();
    for (const auto& t : pack.tubes) {
      // Cells touched over the whole column.
      const auto k_lo = static_cast<std::int64_t>(std::floor((t.u * std::pow(a, pack.b) - t.half_width - w.x2_lo) / w.h));
      const auto k_hi = static_cast<std::int64_t>(std::floor((t.u * std::pow(c, pack.b) + t.half_width - w.x2_lo) / w.h));
      if (k_lo <= prev_touch) rep.disjoint = false;
      prev_touch = std::max(prev_touch, k_hi);
      // Cell centres inside the tube.
      const double centre = (t.u * std::pow(x1, pack.b) - w.x2_lo) / w.h - 0.5;
      auto in_lo = static_cast<std::int64_t>(std::ceil(centre - t.half_width / w.h));
      const auto in_hi = static_cast<std::int64_t>(std::floor(centre + t.half_width / w.h));
      in_lo = std::max(in_lo, prev_in + 1);
      if (in_hi >= in_lo) cells += static_cast<std::size_t>(in_hi - in_lo + 1);
      prev_in = std::max(prev_in, in_hi);
    }
  }
  rep.union_measure = static_cast<double>(cells) * w.h * w.h;
  rep.rel_error = std::abs(rep.union_measure - rep.expected_measure) / rep.expected_measure;
  return rep;
}

std::vector<Interval> ball_hits(double b, double u, double delta, double x1, double x2) {
  if (!(x1 > delta)) throw ParameterError("ball_hits needs x1 > delta");
  auto g = [&](double t) {
    const double d1 = x1 - t, d2 = x2 - u * std::pow(t, b);
    return d1 * d1 + d2 * d2 - delta * delta;
  };
  constexpr int kSamples = 64;
  const double t0 = x1 - delta, dt = 2.0 * delta / kSamples;
  std::vector<double> ts(kSamples + 1), gs(kSamples + 1);
  for (int i = 0; i <= kSamples; ++i) {
    ts[i] = t0 + i * dt;
    gs[i] = g(ts[i]);
  }
  // Positive local minima may hide a sliver between samples.
  std::vector<std::pair<double, double>> extra;
  for (int i = 1; i < kSamples; ++i) {
    if (gs[i] <= 0.0 || gs[i] > gs[i - 1] || gs[i] > gs[i + 1]) continue;
    double lo = ts[i - 1], hi = ts[i + 1];
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double m1 = hi - phi * (hi - lo), m2 = lo + phi * (hi - lo), g1 = g(m1), g2 = g(m2);
    for (int it = 0; it < 80 && std::min(g1, g2) > 0.0; ++it) {
      if (g1 < g2) {
        hi = m2; m2 = m1; g2 = g1; m1 = hi - phi * (hi - lo); g1 = g(m1);
      } else {
        lo = m1; m1 = m2; g1 = g2; m2 = lo + phi * (hi - lo); g2 = g(m2);
      }
    }
    if (g1 <= 0.0) extra.emplace_back(m1, g1);
    else if (g2 <= 0.0) extra.emplace_back(m2, g2);
  }
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i <= kSamples; ++i) pts.emplace_back(ts[i], gs[i]);
  pts.insert(pts.end(), extra.begin(), extra.end());
  std::sort(pts.begin(), pts.end());

  auto root = [&](double a, double c) {  // g(a) and g(c) of opposite sign
    const bool a_in = g(a) <= 0.0;
    for (int it = 0; it < 100 && c - a > 1e-15 * x1; ++it) {
      const double m = 0.5 * (a + c);
      ((g(m) <= 0.0) == a_in ? a : c) = m;
    }
    return 0.5 * (a + c);
  };
  std::vector<Interval> out;
  std::optional<double> start;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const bool in = pts[i].second <= 0.0;
    if (in && !start) start = i == 0 ? pts[0].first : root(pts[i - 1].first, pts[i].first);
    if (!in && start) {
      out.push_back({*start, root(pts[i - 1].first, pts[i].first)});
      start.reset();
    }
  }
  if (start) out.push_back({*start, pts.back().first});
  return out;
}

double hilbert_of_ball(double b, double u, double delta, double x1, double x2) {
  double acc = 0.0;
  for (const auto& iv : ball_hits(b, u, delta, x1, x2)) acc += std::log(iv.hi / iv.lo);
  return acc;
}

double average_of_ball(double b, double u, double delta, double x1, double x2) {
  // I(R)/R peaks at the right end of a hit interval.
  double covered = 0.0, best = 0.0;
  for (const auto& iv : ball_hits(b, u, delta, x1, x2)) {
    covered += iv.length();
    best = std::max(best, covered / iv.hi);
  }
  return best;
}

WitnessRatio witness_ratio(const WitnessPack& pack, double p, WitnessKind kind) {
  if (!(p >= 1.0)) throw ParameterError("p must be at least 1");
  WitnessRatio out;
  out.f_norm = pack.f_delta.lp_norm(p);
  out.pointwise_bound = pack.eps_b / 3.0 * pack.delta;
  const auto count = static_cast<double>(pack.separated_set.size());
  out.predicted = count > 0 ? std::pow(pack.delta, 1.0 - 1.0 / p) * std::pow(count, 1.0 / p) : 0.0;
  if (pack.separated_set.empty()) return out;

  const auto& w = pack.window;
  const auto& us = pack.separated_set;
  const double d = pack.delta, b = pack.b;
  std::vector<double> col_sum(w.cols, 0.0), col_min(w.cols, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> col_tube(w.cols, 0);
  parallel_for(w.cols, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double x1 = w.x1(i), x1b = std::pow(x1, b);
      for (std::size_t k = 0; k < w.rows; ++k) {
        const double x2 = w.x2(k);
        const double u_lo = (x2 - d) / std::pow(x1 + d, b), u_hi = (x2 + d) / std::pow(x1 - d, b);
        double v = 0.0;
        for (auto it = std::lower_bound(us.begin(), us.end(), u_lo); it != us.end() && *it <= u_hi; ++it) {
          const double vu = kind == WitnessKind::hilbert ? hilbert_of_ball(b, *it, d, x1, x2)
                                                         : average_of_ball(b, *it, d, x1, x2);
          v = std::max(v, std::abs(vu));
          if (std::abs(x2 - *it * x1b) <= d / 4.0) {
            col_min[i] = std::min(col_min[i], vu);
            ++col_tube[i];
          }
        }
        col_sum[i] += std::pow(v, p);
      }
    }
  });
  double sum = 0.0;
  out.min_tube_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.cols; ++i) {
    sum += col_sum[i];
    out.min_tube_value = std::min(out.min_tube_value, col_min[i]);
    out.tube_points += col_tube[i];
  }
  out.op_norm = std::pow(w.h * w.h * sum, 1.0 / p);
  out.ratio = out.op_norm / out.f_norm;
  const double union_measure = static_cast<double>(out.tube_points) * w.h * w.h;
  out.analytic_lower = out.pointwise_bound * std::pow(union_measure, 1.0 / p) / out.f_norm;
  return out;
}

double l2_symbol_norm(const MultiplierBank& bank, const NormTarget& target) {
  struct Visitor {
    const MultiplierBank& bank;
    double operator()(const OperatorPiece& p) const { return grid_sup(bank.multiplier(p)); }
    double operator()(const std::vector<OperatorPiece>& ps) const {
      if (ps.empty()) return 1.0;
      auto m = bank.multiplier(ps.front());
      for (std::size_t k = 1; k < ps.size(); ++k) {
        const auto next = bank.multiplier(ps[k]);
        for (std::size_t i = 0; i < m.size(); ++i) m[i] *= next[i];
      }
      return grid_sup(m);
    }
    double operator()(const Spectrum& m) const {
      if (m.size() != bank.n() * bank.n()) throw GridMismatchError("symbol size does not match the grid");
      return grid_sup(m);
    }
    double operator()(const NonlinearOperator& op) const {
      throw UnsupportedError("'" + op.name + "' is not translation-invariant linear; use witness_ratio");
    }
  };
  return std::visit(Visitor{bank}, target);
}

ScalingReport scaling_fit(std::string quantity, std::span<const double> scales, std::span<const double> values,
                          std::optional<double> target) {
  if (scales.size() != values.size()) throw ParameterError("scales and values differ in length");
  if (scales.size() < 4) throw ParameterError("scaling fit needs at least 4 points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0) || !(values[i] > 0.0))
      throw DataError("scaling fit needs positive data; entry " + std::to_string(i) + " is (" +
                      format_number(scales[i]) + ", " + format_number(values[i]) + ")");
    lx.push_back(std::log(scales[i]));
    ly.push_back(std::log(values[i]));
  }
  const auto fit = fit_line(lx, ly);
  ScalingReport r;
  r.quantity = std::move(quantity);
  r.scales.assign(scales.begin(), scales.end());
  r.values.assign(values.begin(), values.end());
  r.exponent = fit.slope;
  r.log_prefactor = fit.intercept;
  r.residuals = fit.residuals;
  r.residual_norm = fit.residual_norm;
  r.target = target;
  return r;
}

void write_scaling_csv(std::ostream& os, const ScalingReport& r) {
  os << "scale,value,fit,resid\n";
  for (std::size_t i = 0; i < r.scales.size(); ++i)
    os << format_number(r.scales[i]) << ',' << format_number(r.values[i]) << ','
       << format_number(std::exp(r.log_prefactor + r.exponent * std::log(r.scales[i]))) << ','
       << format_number(r.residuals[i]) << '\n';
}

double theta(double p, int ell) {
  if (!(p > 1.0 && p <= 2.0)) throw ParameterError("theta needs p in (1, 2]");
  if (ell <= 1.0 / (p - 1.0)) return std::pow(p - 1.0, 3.0 - 10.0 / p);
  return std::pow(static_cast<double>(ell), 7.0 * (2.0 / p - 1.0));
}

PredictedBound predicted_upper_bound(const dilation::DilationSet& U, double p, int ell_max, WitnessKind kind) {
  if (!(p > 1.0 && p <= 2.0)) throw ParameterError("p must lie in (1, 2]");
  if (ell_max < 1) throw ParameterError("ell_max must be at least 1");
  double sum = 0.0;
  for (int ell = 1; ell <= ell_max; ++ell) sum += theta(p, ell) * dilation::kp_value(U, std::ldexp(1.0, -ell), p);
  if (kind == WitnessKind::average) return {sum, false};
  const auto shells = dilation::shell_count(U);
  if (shells.infinite) return {std::numeric_limits<double>::infinity(), true};
  const double log_n = std::log(static_cast<double>(shells.value));
  return {std::pow(p - 1.0, -7.0) * std::sqrt(log_n) + std::pow(p - 1.0, -2.0) * sum, false};
}

void write_witness_csv(std::ostream& os, std::span<const WitnessRow> rows) {
  os << "delta,count,ratio,predicted,ratio_over_predicted\n";
  for (const auto& r : rows)
    os << format_number(r.delta) << ',' << r.count << ',' << format_number(r.ratio) << ','
       << format_number(r.predicted) << ','
       << format_number(r.predicted > 0.0 ? r.ratio / r.predicted : std::nan("")) << '\n';
}

}  // namespace curvemax
