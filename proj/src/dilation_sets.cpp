#include "curvemax/dilation_sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace curvemax::dilation {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<Interval> merge_sorted(std::vector<Interval> v) {
  std::sort(v.begin(), v.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  out.reserve(v.size());
  for (const auto& piece : v) {
    if (!out.empty() && piece.lo <= out.back().hi)
      out.back().hi = std::max(out.back().hi, piece.hi);
    else
      out.push_back(piece);
  }
  return out;
}

void clip_into(std::span<const Interval> pieces, double lo, double hi, double scale,
               std::vector<Interval>& out) {
  auto it = std::partition_point(pieces.begin(), pieces.end(),
                                 [&](const Interval& p) { return p.hi < lo; });
  for (; it != pieces.end() && it->lo <= hi; ++it)
    out.push_back({std::max(it->lo, lo) * scale, std::min(it->hi, hi) * scale});
}

std::vector<Interval> cantor_pieces(const Cantor& c) {
  std::vector<Interval> cur{{0.0, 1.0}};
  const double gap_share = (1.0 - 1.0 / c.divisor) / (c.copies - 1);
  for (int lvl = 0; lvl < c.level; ++lvl) {
    std::vector<Interval> next;
    next.reserve(cur.size() * static_cast<std::size_t>(c.copies));
    for (const auto& piece : cur) {
      const double len = piece.length();
      const double child = len / c.divisor;
      for (int i = 0; i < c.copies; ++i) {
        const double a = piece.lo + i * gap_share * len;
        next.push_back({a, a + child});
      }
    }
    cur = std::move(next);
  }
  for (auto& piece : cur) {
    piece.lo += 1.0;
    piece.hi += 1.0;
  }
  return cur;
}

}  // namespace

DilationSet::DilationSet(Generator gen) : gen_(std::move(gen)) {
  std::visit(
      Overloaded{
          [&](const ExplicitPoints& g) {
            std::vector<Interval> v;
            for (double p : g.points) {
              if (!(p > 0.0) || !std::isfinite(p))
                throw ParameterError("explicit set: points must be finite and positive");
              v.push_back({p, p});
            }
            if (v.empty()) throw ParameterError("explicit set: no points");
            pieces_ = std::make_shared<const std::vector<Interval>>(merge_sorted(std::move(v)));
          },
          [&](const IntervalGen& g) {
            if (!(g.a1 >= 0.0) || !(g.a2 >= g.a1) || std::isnan(g.a2) || g.a2 <= 0.0)
              throw ParameterError("interval set: need 0 <= a1 <= a2, a2 > 0");
          },
          [&](const Lacunary& g) {
            if (!(g.lambda > 1.0) || !std::isfinite(g.lambda))
              throw ParameterError("lacunary set: lambda must exceed 1");
            if (g.k_min && g.k_max && *g.k_min > *g.k_max)
              throw ParameterError("lacunary set: k_min > k_max");
          },
          [&](const Cantor& g) {
            if (g.copies < 2 || !(g.divisor > 1.0) || g.copies > g.divisor || g.level < 0 ||
                g.level > 24)
              throw ParameterError("cantor set: need 2 <= copies <= divisor, 0 <= level <= 24");
            if (std::pow(static_cast<double>(g.copies), g.level) > 2.0e7)
              throw ParameterError("cantor set: level too deep to enumerate");
            pieces_ = std::make_shared<const std::vector<Interval>>(cantor_pieces(g));
          },
          [&](const ConvexSequence& g) {
            if (!(g.a > 0.0) || g.n_max < 1 || g.n_max > 50'000'000)
              throw ParameterError("convex sequence: need a > 0 and 1 <= n_max <= 5e7");
            std::vector<Interval> v;
            v.reserve(static_cast<std::size_t>(g.n_max) + 1);
            v.push_back({1.0, 1.0});
            for (std::int64_t n = g.n_max; n >= 1; --n) {
              const double p = 1.0 + std::pow(static_cast<double>(n), -g.a);
              v.push_back({p, p});
            }
            pieces_ = std::make_shared<const std::vector<Interval>>(merge_sorted(std::move(v)));
          },
          [&](const DyadicUnion& g) {
            if (!g.base) throw ParameterError("dyadic union: missing base set");
            const auto ext = g.base->extent();
            if (!(ext.lo > 0.0) || !std::isfinite(ext.hi))
              throw ParameterError("dyadic union: base set must be bounded away from 0 and inf");
            if (!g.all_shells && g.shells.empty())
              throw ParameterError("dyadic union: empty shell list");
          },
          [&](const Dilated& g) {
            if (!g.base) throw ParameterError("dilated set: missing base set");
            if (!(g.factor > 0.0) || !std::isfinite(g.factor))
              throw ParameterError("dilated set: factor must be positive");
          },
      },
      gen_);
}

DilationSet DilationSet::points(std::vector<double> pts) {
  return DilationSet(ExplicitPoints{std::move(pts)});
}
DilationSet DilationSet::interval(double a1, double a2) { return DilationSet(IntervalGen{a1, a2}); }
DilationSet DilationSet::lacunary(double lambda, std::optional<std::int64_t> k_min,
                                  std::optional<std::int64_t> k_max) {
  return DilationSet(Lacunary{lambda, k_min, k_max});
}
DilationSet DilationSet::cantor(int copies, double divisor, int level) {
  return DilationSet(Cantor{copies, divisor, level});
}
DilationSet DilationSet::convex_sequence(double a, std::int64_t n_max) {
  return DilationSet(ConvexSequence{a, n_max});
}
DilationSet DilationSet::dyadic_union(const DilationSet& base, std::vector<int> shells) {
  std::sort(shells.begin(), shells.end());
  shells.erase(std::unique(shells.begin(), shells.end()), shells.end());
  return DilationSet(DyadicUnion{std::make_shared<const DilationSet>(base), std::move(shells), false});
}
DilationSet DilationSet::dyadic_union_all(const DilationSet& base) {
  return DilationSet(DyadicUnion{std::make_shared<const DilationSet>(base), {}, true});
}
DilationSet DilationSet::dilate(double factor) const {
  return DilationSet(Dilated{std::make_shared<const DilationSet>(*this), factor});
}

std::string DilationSet::name() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const ExplicitPoints& g) { os << "explicit(" << g.points.size() << " points)"; },
                 [&](const IntervalGen& g) { os << "interval[" << g.a1 << "," << g.a2 << "]"; },
                 [&](const Lacunary& g) { os << "lacunary(lambda=" << g.lambda << ")"; },
                 [&](const Cantor& g) {
                   os << "cantor(copies=" << g.copies << ",divisor=" << g.divisor
                      << ",level=" << g.level << ")";
                 },
                 [&](const ConvexSequence& g) {
                   os << "convex_seq(a=" << g.a << ",n_max=" << g.n_max << ")";
                 },
                 [&](const DyadicUnion& g) { os << "dyadic_union(" << g.base->name() << ")"; },
                 [&](const Dilated& g) { os << g.factor << "*" << g.base->name(); },
             },
             gen_);
  return os.str();
}

double DilationSet::resolution_floor() const {
  return std::visit(
      Overloaded{
          [](const Cantor& g) { return std::pow(g.divisor, -g.level); },
          [](const ConvexSequence& g) { return std::pow(static_cast<double>(g.n_max), -g.a); },
          [](const DyadicUnion& g) { return g.base->resolution_floor(); },
          [](const Dilated& g) { return g.base->resolution_floor(); },
          [](const auto&) { return 0.0; },
      },
      gen_);
}

std::optional<double> DilationSet::period() const {
  return std::visit(Overloaded{
                        [](const Lacunary& g) -> std::optional<double> {
                          if (!g.k_min && !g.k_max) return g.lambda;
                          return std::nullopt;
                        },
                        [](const DyadicUnion& g) -> std::optional<double> {
                          if (g.all_shells) return 2.0;
                          return std::nullopt;
                        },
                        [](const Dilated& g) { return g.base->period(); },
                        [](const auto&) -> std::optional<double> { return std::nullopt; },
                    },
                    gen_);
}

Interval DilationSet::extent() const {
  return std::visit(
      Overloaded{
          [&](const IntervalGen& g) { return Interval{g.a1, g.a2}; },
          [&](const Lacunary& g) {
            return Interval{g.k_min ? std::pow(g.lambda, static_cast<double>(*g.k_min)) : 0.0,
                            g.k_max ? std::pow(g.lambda, static_cast<double>(*g.k_max)) : kInf};
          },
          [&](const DyadicUnion& g) {
            if (g.all_shells) return Interval{0.0, kInf};
            const auto ext = g.base->extent();
            return Interval{std::ldexp(ext.lo, g.shells.front()), std::ldexp(ext.hi, g.shells.back())};
          },
          [&](const Dilated& g) {
            const auto ext = g.base->extent();
            return Interval{ext.lo * g.factor, ext.hi * g.factor};
          },
          [&](const auto&) { return Interval{pieces_->front().lo, pieces_->back().hi}; },
      },
      gen_);
}

std::vector<Interval> DilationSet::components(double lo, double hi) const {
  std::vector<Interval> out;
  if (!(hi >= lo)) return out;
  std::visit(
      Overloaded{
          [&](const IntervalGen& g) {
            const double a = std::max(lo, g.a1), b = std::min(hi, g.a2);
            if (a <= b) out.push_back({a, b});
          },
          [&](const Lacunary& g) {
            if (!(hi > 0.0)) return;
            const double llam = std::log(g.lambda);
            const double safe_lo = std::max(lo, std::numeric_limits<double>::min());
            auto k0 = static_cast<std::int64_t>(std::floor(std::log(safe_lo) / llam)) - 1;
            auto k1 = static_cast<std::int64_t>(std::ceil(std::log(hi) / llam)) + 1;
            if (g.k_min) k0 = std::max(k0, *g.k_min);
            if (g.k_max) k1 = std::min(k1, *g.k_max);
            for (std::int64_t k = k0; k <= k1; ++k) {
              const double v = std::pow(g.lambda, static_cast<double>(k));
              if (v >= lo && v <= hi) out.push_back({v, v});
            }
          },
          [&](const DyadicUnion& g) {
            const auto ext = g.base->extent();
            std::vector<Interval> raw;
            auto add_shell = [&](int k) {
              const double s = std::ldexp(1.0, k);
              for (const auto& p : g.base->components(lo / s, hi / s))
                raw.push_back({p.lo * s, p.hi * s});
            };
            if (g.all_shells) {
              if (!(hi > 0.0)) return;
              const int k0 = static_cast<int>(std::floor(std::log2(std::max(lo, 1e-300) / ext.hi))) - 1;
              const int k1 = static_cast<int>(std::ceil(std::log2(hi / ext.lo))) + 1;
              for (int k = k0; k <= k1; ++k) add_shell(k);
            } else {
              for (int k : g.shells) add_shell(k);
            }
            out = merge_sorted(std::move(raw));
          },
          [&](const Dilated& g) {
            for (const auto& p : g.base->components(lo / g.factor, hi / g.factor))
              out.push_back({p.lo * g.factor, p.hi * g.factor});
          },
          [&](const auto&) { clip_into(*pieces_, lo, hi, 1.0, out); },
      },
      gen_);
  return out;
}

std::vector<std::int64_t> RescaledSet::cells() const {
  std::vector<std::int64_t> out;
  const double eps = 1e-9;
  for (const auto& p : components) {
    const auto k0 = static_cast<std::int64_t>(std::floor((p.lo - 1.0) / delta + eps));
    auto k1 = k0;
    if (p.hi - p.lo > 1e-12 * delta)
      k1 = std::max(k0, static_cast<std::int64_t>(std::ceil((p.hi - 1.0) / delta - eps)) - 1);
    for (auto k = k0; k <= k1; ++k)
      if (out.empty() || out.back() < k) out.push_back(k);
  }
  return out;
}

RescaledSet rescale(const DilationSet& u, double r, double delta) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ParameterError("rescale: r must be positive");
  if (!(delta > 0.0)) throw ParameterError("rescale: delta must be positive");
  if (delta < u.resolution_floor())
    throw ResolutionError("rescale: delta=" + format_number(delta) + " is below the resolution floor " +
                          format_number(u.resolution_floor()) + " of " + u.name());
  RescaledSet out;
  out.r = r;
  out.delta = delta;
  for (const auto& p : u.components(r, 2.0 * r))
    out.components.push_back({std::clamp(p.lo / r, 1.0, 2.0), std::clamp(p.hi / r, 1.0, 2.0)});
  return out;
}

std::int64_t greedy_cover(std::span<const Interval> pieces, double lo, double hi, double width) {
  const double eps = 1e-9 * width;
  auto it = std::partition_point(pieces.begin(), pieces.end(),
                                 [&](const Interval& p) { return p.hi < lo; });
  std::int64_t count = 0;
  double covered = -kInf;
  while (it != pieces.end() && it->lo <= hi) {
    const double a = std::max(it->lo, lo);
    const double b = std::min(it->hi, hi);
    if (b > covered + eps) {
      const double start = a > covered + eps ? a : covered;
      const auto k = std::max<std::int64_t>(
          1, static_cast<std::int64_t>(std::ceil((b - start) / width - 1e-9)));
      count += k;
      covered = start + static_cast<double>(k) * width;
    }
    if (covered + eps >= hi) break;
    it =std::partition_point(it, pieces.end(),
                              [&](const Interval& p) { return p.hi <= covered + eps; });
  }
  return count;
}

CoveringCount covering_number(const RescaledSet& e, double delta) {
  if (!(delta > 0.0)) throw ParameterError("covering_number: delta must be positive");
  if (delta < e.delta * (1.0 - 1e-12))
    throw ResolutionError("covering_number: delta finer than the set's cell scale");
  if (e.empty()) return {0, true};
  return {greedy_cover(e.components, 1.0, 2.0, delta), false};
}

std::vector<double> r_grid(const DilationSet& u, double delta) {
  const double lrho = std::log1p(delta / 8.0);
  std::int64_t k0 = 0, k1 = 0;
  if (auto per = u.period()) {
    k1 = static_cast<std::int64_t>(std::ceil(std::log(*per) / lrho)) - 1;
  } else {
    const auto ext = u.extent();
    double r_lo, r_hi;
    if (ext.lo > 0.0 && std::isfinite(ext.hi)) {
      r_lo = ext.lo / 2.0;
      r_hi = ext.hi;
    } else if (ext.lo > 0.0) {
      r_lo = ext.lo / 2.0;
      r_hi = 2.0 * ext.lo;
    } else if (std::isfinite(ext.hi)) {
      r_lo = ext.hi / 4.0;
      r_hi = ext.hi;
    } else {
      r_lo = r_hi = 1.0;
    }
    k0 = static_cast<std::int64_t>(std::floor(std::log(r_lo) / lrho));
    k1 = static_cast<std::int64_t>(std::ceil(std::log(r_hi) / lrho));
  }
  if (k1 - k0 > 200'000'000) throw ParameterError("r_grid: too many grid points; raise delta");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(k1 - k0 + 1));
  for (auto k = k0; k <= k1; ++k) out.push_back(std::exp(static_cast<double>(k) * lrho));
  return out;
}

SupCovering sup_covering_number(const DilationSet& u, double delta) {
  if (!(delta > 0.0)) throw ParameterError("sup_covering_number: delta must be positive");
  if (delta < u.resolution_floor())
    throw ResolutionError("sup_covering_number: delta=" + format_number(delta) +
                          " is below the resolution floor of " + u.name());
  const auto grid = r_grid(u, delta);
  const auto pieces = u.components(grid.front(), 2.0 * grid.back());

  struct Best {
    std::int64_t count = -1;
    std::size_t index = 0;
  };
  const std::size_t workers = std::min<std::size_t>(thread_count(), grid.size());
  const std::size_t chunk = (grid.size() + workers - 1) / workers;
  std::vector<Best> partial((grid.size() + chunk - 1) / chunk);
  parallel_for(partial.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t c = b; c < e; ++c) {
      Best best;
      const std::size_t end = std::min(grid.size(), (c + 1) * chunk);
      for (std::size_t i = c * chunk; i < end; ++i) {
        const double r = grid[i];
        const auto n = greedy_cover(pieces, r, 2.0 * r, r * delta);
        if (n > best.count) best = {n, i};
      }
      partial[c] = best;
    }
  });
  Best best;
  for (const auto& p : partial)
    if (p.count > best.count) best = p;  // chunks are in index order, ties keep the first
  return {std::max<std::int64_t>(best.count, 0), grid[best.index], grid.size()};
}

double kp_value(const DilationSet& u, double delta, double p) {
  if (!(p > 1.0 && p <= 2.0)) throw ParameterError("kp_value: p must lie in (1,2]");
  const auto sup = sup_covering_number(u, delta);
  return std::pow(delta, 1.0 - 1.0 / p) * std::pow(static_cast<double>(sup.count), 1.0 / p);
}

ShellCount shell_count(const DilationSet& u) {
  if (u.period()) return {true, 0};
  const auto ext = u.extent();
  if (!(ext.lo > 0.0) || !std::isfinite(ext.hi)) return {true, 0};
  std::vector<std::int64_t> shells;
  auto floor_log2 = [](double x) {
    int e = 0;
    std::frexp(x, &e);
    return static_cast<std::int64_t>(e - 1);
  };
  auto is_pow2 = [](double x) {
    int e = 0;
    return std::frexp(x, &e) == 0.5;
  };
  for (const auto& p : u.components(ext.lo, ext.hi)) {
    // Closed shells [2^n, 2^{n+1}]: a power of two sits in two of them.
    const auto n0 = is_pow2(p.lo) ? floor_log2(p.lo) - 1 : floor_log2(p.lo);
    const auto n1 = floor_log2(p.hi);
    for (auto n = n0; n <= n1; ++n) shells.push_back(n);
  }
  std::sort(shells.begin(), shells.end());
  shells.erase(std::unique(shells.begin(), shells.end()), shells.end());
  return {false, 1 + static_cast<std::int64_t>(shells.size())};
}

PcrEstimate pcr_estimate(const DilationSet& u, double delta_min, double delta_max,
                         double samples_per_decade) {
  if (!(delta_min > 0.0) || !(delta_max > delta_min) || !(delta_max < 1.0))
    throw ParameterError("pcr_estimate: need 0 < delta_min < delta_max < 1");
  if (!(samples_per_decade > 0.0)) throw ParameterError("pcr_estimate: samples_per_decade must be positive");
  if (delta_min < u.resolution_floor())
    throw ResolutionError("pcr_estimate: delta_min below the resolution floor of " + u.name());
  const double decades = std::log10(delta_max / delta_min);
  const auto m = std::max<std::size_t>(5, static_cast<std::size_t>(std::ceil(decades * samples_per_decade)) + 1);
  PcrEstimate out;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < m; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(m - 1);
    const double d = delta_max * std::pow(delta_min / delta_max, t);
    const auto sup = sup_covering_number(u, d);
    out.deltas.push_back(d);
    out.counts.push_back(sup.count);
    x.push_back(std::log(1.0 / d));
    y.push_back(std::log(static_cast<double>(std::max<std::int64_t>(sup.count, 1))));
  }
  const auto fit = fit_line(x, y);
  out.residuals = fit.residuals;
  out.residual_norm = fit.residual_norm;
  if (std::all_of(out.counts.begin(), out.counts.end(),
                  [&](std::int64_t c) { return c == out.counts.front(); })) {
    out.flat = true;
    out.slope = 0.0;
    out.estimate = 1.0;
    return out;
  }
  out.slope = fit.slope;
  out.estimate = std::clamp(1.0 + fit.slope, 1.0, 2.0);
  return out;
}

CoveringProfile covering_profile(const DilationSet& u, std::span<const double> deltas) {
  CoveringProfile prof;
  for (double d : deltas) {
    const auto sup = sup_covering_number(u, d);
    prof.deltas.push_back(d);
    prof.counts.push_back(sup.count);
    prof.witness_r.push_back(sup.witness_r);
  }
  return prof;
}

void write_covering_profile_csv(std::ostream& os, const CoveringProfile& profile) {
  os << "delta,sup_count,witness_r\n";
  for (std::size_t i = 0; i < profile.deltas.size(); ++i)
    os << format_number(profile.deltas[i]) << ',' << profile.counts[i] << ','
       << format_number(profile.witness_r[i]) << '\n';
}

}  // namespace curvemax::dilation
