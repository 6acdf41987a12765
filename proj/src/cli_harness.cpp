#include "curvemax/cli_harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "curvemax/curve_measures.hpp"
#include "curvemax/freq_decomp.hpp"
#include "curvemax/norm_lab.hpp"
#include "curvemax/symbols.hpp"

namespace curvemax::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double parse_plain(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ParameterError("'" + std::string(s) + "' is not a number");
  return v;
}

// Accepts plain decimals and the shorthands a^k and a/c.
double parse_number(std::string_view s) {
  s = trim(s);
  if (const auto k = s.find('^'); k != std::string_view::npos)
    return std::pow(parse_plain(s.substr(0, k)), parse_plain(s.substr(k + 1)));
  if (const auto k = s.find('/'); k != std::string_view::npos) {
    const double den = parse_plain(s.substr(k + 1));
    if (den == 0.0) throw ParameterError("division by zero in '" + std::string(s) + "'");
    return parse_plain(s.substr(0, k)) / den;
  }
  const double v = parse_plain(s);
  if (!std::isfinite(v)) throw ParameterError("'" + std::string(s) + "' is not finite");
  return v;
}

std::int64_t parse_int(std::string_view s) {
  s = trim(s);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ParameterError("'" + std::string(s) + "' is not an integer");
  return v;
}

std::vector<double> parse_list(std::string_view s) {
  std::vector<double> out;
  while (true) {
    const auto k = s.find(',');
    const auto item = trim(s.substr(0, k));
    if (!item.empty()) out.push_back(parse_number(item));
    if (k == std::string_view::npos) break;
    s.remove_prefix(k + 1);
  }
  return out;
}

std::string one_of(std::string_view v, std::initializer_list<std::string_view> allowed) {
  for (auto a : allowed)
    if (a == v) return std::string(v);
  std::string msg = "'" + std::string(v) + "' must be one of";
  for (auto a : allowed) msg += " " + std::string(a);
  throw ParameterError(msg);
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"curve.b", [](auto& c, auto v) { c.curve.b = parse_number(v); }},
      {"curve.c_plus", [](auto& c, auto v) { c.curve.c_plus = parse_number(v); }},
      {"curve.c_minus", [](auto& c, auto v) { c.curve.c_minus = parse_number(v); }},
      {"set.kind", [](auto& c, auto v) { c.set_kind = one_of(v, {"interval", "points", "lacunary", "cantor", "convex"}); }},
      {"set.interval.a1", [](auto& c, auto v) { c.interval_a1 = parse_number(v); }},
      {"set.interval.a2", [](auto& c, auto v) { c.interval_a2 = parse_number(v); }},
      {"set.points.values", [](auto& c, auto v) { c.points = parse_list(v); }},
      {"set.lacunary.lambda", [](auto& c, auto v) { c.lacunary_lambda = parse_number(v); }},
      {"set.lacunary.k_min", [](auto& c, auto v) { c.lacunary_k_min = parse_int(v); }},
      {"set.lacunary.k_max", [](auto& c, auto v) { c.lacunary_k_max = parse_int(v); }},
      {"set.cantor.copies", [](auto& c, auto v) { c.cantor_copies = static_cast<int>(parse_int(v)); }},
      {"set.cantor.ratio", [](auto& c, auto v) { c.cantor_ratio = parse_number(v); }},
      {"set.cantor.level", [](auto& c, auto v) { c.cantor_level = static_cast<int>(parse_int(v)); }},
      {"set.convex.a", [](auto& c, auto v) { c.convex_a = parse_number(v); }},
      {"set.convex.n_max", [](auto& c, auto v) { c.convex_n_max = parse_int(v); }},
      {"grid.n", [](auto& c, auto v) {
         const auto n = parse_int(v);
         if (n < 8) throw ParameterError("grid.n must be at least 8");
         c.grid_n = static_cast<std::size_t>(n);
       }},
      {"grid.L", [](auto& c, auto v) { c.grid_L = parse_number(v); }},
      {"operator.kind", [](auto& c, auto v) { c.op_kind = one_of(v, {"hilbert", "average"}); }},
      {"operator.p", [](auto& c, auto v) { c.p = parse_number(v); }},
      {"operator.j_min", [](auto& c, auto v) { c.j_min = static_cast<int>(parse_int(v)); }},
      {"operator.j_max", [](auto& c, auto v) { c.j_max = static_cast<int>(parse_int(v)); }},
      {"operator.ell_min", [](auto& c, auto v) { c.ell_min = static_cast<int>(parse_int(v)); }},
      {"operator.ell_max", [](auto& c, auto v) { c.ell_max = static_cast<int>(parse_int(v)); }},
      {"operator.u_samples", [](auto& c, auto v) { c.u_samples = parse_list(v); }},
      {"operator.R_grid", [](auto& c, auto v) { c.R_grid = trim(v) == "auto" ? std::vector<double>{} : parse_list(v); }},
      {"operator.R_substeps", [](auto& c, auto v) { c.R_substeps = static_cast<int>(parse_int(v)); }},
      {"operator.quadrature_nodes", [](auto& c, auto v) { c.quadrature_nodes = static_cast<int>(parse_int(v)); }},
      {"fourier.symbol", [](auto& c, auto v) { c.symbol = std::string(to_string(parse_symbol_kind(trim(v)))); }},
      {"fourier.direction1", [](auto& c, auto v) { c.direction1 = parse_number(v); }},
      {"fourier.direction2", [](auto& c, auto v) { c.direction2 = parse_number(v); }},
      {"witness.r", [](auto& c, auto v) {
         if (trim(v) == "auto") c.witness_r.reset();
         else c.witness_r = parse_number(v);
       }},
      {"field.band", [](auto& c, auto v) { c.band = parse_number(v); }},
      {"experiment.name", [](auto& c, auto v) { c.experiment_name = one_of(v, {"setinfo", "fourier", "decompose", "witness", "maxop"}); }},
      {"experiment.scales", [](auto& c, auto v) { c.scales = parse_list(v); }},
      {"experiment.output", [](auto& c, auto v) {
         const std::string s(trim(v));
         if (s.empty() || s.find('/') != std::string::npos) throw ParameterError("experiment.output must be a plain file name");
         c.output = s;
       }},
      {"seed", [](auto& c, auto v) {
         const auto s = parse_int(v);
         if (s < 0) throw ParameterError("seed must be nonnegative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
  };
  return table;
}

[[noreturn]] void fail(const ExperimentConfig& c, const std::string& key, const std::string& msg) {
  const auto it = c.key_lines.find(key);
  const std::string where = it != c.key_lines.end() ? c.source + ":" + std::to_string(it->second) + ": " : "";
  throw ParameterError(where + key + ": " + msg);
}

void check_common(const ExperimentConfig& c) {
  try {
    c.curve.validate();
  } catch (const ParameterError& e) {
    fail(c, "curve.b", e.what());
  }
  if (!(c.grid_L > 0.0)) fail(c, "grid.L", "must be positive");
  if (c.quadrature_nodes < 2) fail(c, "operator.quadrature_nodes", "must be at least 2");
  if (c.R_substeps < 1) fail(c, "operator.R_substeps", "must be at least 1");
  for (double u : c.u_samples)
    if (!(u > 0.0)) fail(c, "operator.u_samples", "entries must be positive");
  if (c.u_samples.empty()) fail(c, "operator.u_samples", "must not be empty");
  for (std::size_t i = 0; i < c.R_grid.size(); ++i)
    if (!(c.R_grid[i] > 0.0) || (i > 0 && c.R_grid[i] <= c.R_grid[i - 1]))
      fail(c, "operator.R_grid", "must be positive and strictly increasing");
  if (c.band < 0.0) fail(c, "field.band", "must be nonnegative");
  try {
    (void)c.make_set();
  } catch (const ParameterError& e) {
    fail(c, "set.kind", e.what());
  }
}

std::string hex64(std::uint64_t v) {
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = "0123456789abcdef"[v & 15];
  return s;
}

std::string num(double v) { return format_number(v); }

std::vector<double> scales_or(const ExperimentConfig& c, std::vector<double> fallback) {
  return c.scales.empty() ? fallback : c.scales;
}

std::vector<double> powers(double base, int from, int to) {
  std::vector<double> out;
  for (int k = from; from <= to ? k <= to : k >= to; k += from <= to ? 1 : -1) out.push_back(std::pow(base, k));
  return out;
}

double band_of(const ExperimentConfig& c) {
  return c.band > 0.0 ? c.band : 3.141592653589793238 * static_cast<double>(c.grid_n) / c.grid_L;
}

}  // namespace

dilation::DilationSet ExperimentConfig::make_set() const {
  using dilation::DilationSet;
  if (set_kind == "interval") return DilationSet::interval(interval_a1, interval_a2);
  if (set_kind == "points") return DilationSet::points(points);
  if (set_kind == "lacunary") return DilationSet::lacunary(lacunary_lambda, lacunary_k_min, lacunary_k_max);
  if (set_kind == "cantor") {
    if (!(cantor_ratio > 0.0 && cantor_ratio < 1.0)) throw ParameterError("set.cantor.ratio must lie in (0, 1)");
    return DilationSet::cantor(cantor_copies, 1.0 / cantor_ratio, cantor_level);
  }
  if (set_kind == "convex") return DilationSet::convex_sequence(convex_a, convex_n_max);
  throw ParameterError("unknown set kind '" + set_kind + "'");
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
    return s;
  };
  auto opt = [](const auto& o) { return o ? std::to_string(*o) : std::string("none"); };
  os << "curve.b=" << num(curve.b) << "\ncurve.c_plus=" << num(curve.c_plus) << "\ncurve.c_minus=" << num(curve.c_minus)
     << "\nset.kind=" << set_kind << "\nset.interval.a1=" << num(interval_a1) << "\nset.interval.a2=" << num(interval_a2)
     << "\nset.points.values=" << list(points) << "\nset.lacunary.lambda=" << num(lacunary_lambda)
     << "\nset.lacunary.k_min=" << opt(lacunary_k_min) << "\nset.lacunary.k_max=" << opt(lacunary_k_max)
     << "\nset.cantor.copies=" << cantor_copies << "\nset.cantor.ratio=" << num(cantor_ratio)
     << "\nset.cantor.level=" << cantor_level << "\nset.convex.a=" << num(convex_a)
     << "\nset.convex.n_max=" << convex_n_max << "\ngrid.n=" << grid_n << "\ngrid.L=" << num(grid_L)
     << "\noperator.kind=" << op_kind << "\noperator.p=" << num(p) << "\noperator.j_min=" << j_min
     << "\noperator.j_max=" << j_max << "\noperator.ell_min=" << ell_min << "\noperator.ell_max=" << ell_max
     << "\noperator.u_samples=" << list(u_samples) << "\noperator.R_grid=" << (R_grid.empty() ? "auto" : list(R_grid))
     << "\noperator.R_substeps=" << R_substeps << "\noperator.quadrature_nodes=" << quadrature_nodes
     << "\nfourier.symbol=" << symbol << "\nfourier.direction1=" << num(direction1)
     << "\nfourier.direction2=" << num(direction2)
     << "\nwitness.r=" << (witness_r ? num(*witness_r) : "auto") << "\nfield.band=" << num(band)
     << "\nexperiment.name=" << experiment_name << "\nexperiment.scales=" << list(scales)
     << "\nexperiment.output=" << output << "\nseed=" << seed << '\n';
  return os.str();
}

ExperimentConfig parse_config(std::string_view text, std::string_view source) {
  ExperimentConfig cfg;
  cfg.source = std::string(source);
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = cfg.source + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParameterError(where + "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ParameterError(where + "unknown key '" + key + "'");
    if (cfg.key_lines.count(key))
      throw ParameterError(where + "duplicate key '" + key + "' (first set on line " +
                           std::to_string(cfg.key_lines[key]) + ")");
    if (value.empty()) throw ParameterError(where + key + ": missing value");
    try {
      it->second(cfg, value);
    } catch (const ParameterError& e) {
      throw ParameterError(where + key + ": " + e.what());
    }
    cfg.key_lines[key] = line_no;
  }
  check_common(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

void validate_for(const ExperimentConfig& c, std::string_view sub) {
  one_of(sub, {"setinfo", "fourier", "decompose", "witness", "maxop"});
  if (!c.experiment_name.empty() && c.experiment_name != sub)
    fail(c, "experiment.name", "config is for '" + c.experiment_name + "', not '" + std::string(sub) + "'");
  if (sub == "setinfo" || sub == "witness") {
    for (double d : c.scales)
      if (!(d > 0.0 && d < 1.0)) fail(c, "experiment.scales", "scales delta must lie in (0, 1), got " + num(d));
  } else {
    for (double d : c.scales)
      if (!(d > 0.0)) fail(c, "experiment.scales", "scales must be positive");
  }
  if (sub == "setinfo" && !(c.p >= 1.0)) fail(c, "operator.p", "must be at least 1");
  if (sub == "setinfo" && !c.scales.empty() && c.scales.size() < 2)
    fail(c, "experiment.scales", "setinfo needs at least two scales");
  if (sub == "witness" && !(c.p > 1.0 && c.p <= 2.0)) fail(c, "operator.p", "witness needs p in (1, 2]");
  if (sub == "witness" && c.witness_r && !(*c.witness_r > 0.0)) fail(c, "witness.r", "must be positive");
  if (sub == "maxop" && !(c.p >= 1.0)) fail(c, "operator.p", "must be at least 1");
  if (sub == "decompose") {
    if (c.j_min > c.j_max) fail(c, "operator.j_min", "must not exceed operator.j_max");
    if (c.ell_min < 0) fail(c, "operator.ell_min", "must be nonnegative");
  }
  if (sub == "fourier" && c.direction1 == 0.0 && c.direction2 == 0.0)
    fail(c, "fourier.direction1", "direction must be nonzero");
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunResult run_setinfo(const ExperimentConfig& c) {
  const auto U = c.make_set();
  const auto deltas = scales_or(c, powers(2.0, -3, -10));
  RunResult res;
  std::ostringstream os;
  os << "delta,sup_count,witness_r,kp,p\n";
  for (double d : deltas) {
    const auto sc = dilation::sup_covering_number(U, d);
    os << num(d) << ',' << sc.count << ',' << num(sc.witness_r) << ',' << num(dilation::kp_value(U, d, c.p)) << ','
       << num(c.p) << '\n';
  }
  const auto [lo, hi] = std::minmax_element(deltas.begin(), deltas.end());
  const auto pcr = dilation::pcr_estimate(U, *lo, *hi, 6.0);
  const auto shells = dilation::shell_count(U);
  os << "# summary pcr_estimate=" << num(pcr.estimate)
     << " shell_count=" << (shells.infinite ? std::string("inf") : std::to_string(shells.value)) << '\n';
  res.csv = os.str();
  return res;
}

RunResult run_fourier(const ExperimentConfig& c) {
  const auto kind = parse_symbol_kind(c.symbol);
  const MeasureSymbol sym(c.curve, kind);
  const auto lambdas = scales_or(c, powers(2.0, 4, 12));
  std::vector<std::pair<double, double>> pts;
  for (double l : lambdas) pts.emplace_back(l * c.direction1, l * c.direction2);
  RunResult res;
  std::ostringstream os;
  write_symbol_csv(os, sym, pts);
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto v = sym.evaluate(pts[i].first, pts[i].second);
    if (v.flagged) res.warnings.push_back("symbol error estimate above tolerance at lambda=" + num(lambdas[i]));
    if (std::abs(v.value) > 0.0) {
      xs.push_back(lambdas[i]);
      ys.push_back(std::abs(v.value));
    }
  }
  if (xs.size() >= 4)
    os << "# summary decay_exponent=" << num(scaling_fit("abs_symbol", xs, ys).exponent) << '\n';
  else
    os << "# summary decay_exponent=n/a\n";
  res.csv = os.str();
  return res;
}

RunResult run_decompose(const ExperimentConfig& c) {
  RunResult res;
  std::ostringstream os;
  os << "j,ell,u,sup_abs,reproduction_rel_error\n";
  if (c.ell_min > c.ell_max) {
    res.csv = os.str();
    return res;
  }
  const MultiplierBank bank(c.curve, c.grid_n, c.grid_L);
  const auto f = random_band_limited_field(c.grid_n, c.grid_L, band_of(c), c.seed);
  const auto q = QuadratureScheme::midpoint(c.quadrature_nodes);
  const double b = c.curve.b;
  std::ostringstream notes;
  for (double u : c.u_samples) {
    const int n_shell = static_cast<int>(std::floor(std::log2(u) / b));
    const double s = std::clamp(u / std::pow(2.0, b * n_shell), 1.0, std::pow(2.0, b));
    for (int j = c.j_min; j <= c.j_max; ++j) {
      try {
        check_reach(c.curve, j, u, c.grid_L, false);
      } catch (const ReachError& e) {
        notes << "# skipped j=" << j << " u=" << num(u) << ": " << e.what() << '\n';
        res.warnings.push_back(e.what());
        continue;
      }
      std::vector<double> ells, sups;
      for (int ell = c.ell_min; ell <= c.ell_max; ++ell) {
        const double sup = grid_sup(bank.multiplier(OperatorPiece::A(j, ell, u)));
        os << j << ',' << ell << ',' << num(u) << ',' << num(sup) << ',';
        if (ell >= 1) {
          const auto r = reproduction_check(bank, j, ell, n_shell, s, f);
          os << (r.exact_zero ? std::string("0") : num(r.rel_error)) << '\n';
        } else {
          os << "nan\n";
        }
        if (sup > 0.0) {
          ells.push_back(ell);
          sups.push_back(std::log2(sup));
        }
      }
      // Source spectrum inside the captured disc at this level.
      const double scale = std::max(std::ldexp(1.0, -j), u * std::pow(2.0, -j * b));
      const double cap = 0.9 * 5.0 * std::ldexp(1.0, c.ell_max - 2) / scale;
      const double step = 2.0 * 3.141592653589793238 / c.grid_L;
      const double hi = std::min(cap, 0.5 * band_of(c));
      if (c.ell_max >= 0 && hi > 2.0 * step) {
        const auto src = TrigPolynomial::random(c.grid_n, c.grid_L, 16, step, hi, c.seed + 1);
        const auto d = tau_decomposition_check(bank, j, u, src, c.ell_max, q, std::max<std::size_t>(1, c.grid_n / 32));
        notes << "# decomposition j=" << j << " u=" << num(u) << " rel_error=" << num(d.rel_error) << '\n';
      }
      if (ells.size() >= 2) {
        const auto fit = fit_line(ells, sups);
        notes << "# summary slope j=" << j << " u=" << num(u) << " value=" << num(fit.slope) << '\n';
      } else {
        notes << "# summary slope j=" << j << " u=" << num(u) << " value=n/a\n";
      }
    }
  }
  os << notes.str();
  res.csv = os.str();
  return res;
}

RunResult run_witness(const ExperimentConfig& c) {
  const auto U = c.make_set();
  const auto kind = c.op_kind == "average" ? WitnessKind::average : WitnessKind::hilbert;
  WitnessGrid grid;
  if (c.key_lines.count("grid.n")) grid.n = c.grid_n;
  if (c.key_lines.count("grid.L")) grid.L = c.grid_L;
  RunResult res;
  std::vector<WitnessRow> rows;
  std::ostringstream notes;
  double lo = 0.0, hi = 0.0;
  for (double d : scales_or(c, powers(2.0, -4, -7))) {
    const double r = c.witness_r ? *c.witness_r
                                 : dilation::sup_covering_number(U.dilate(std::abs(c.curve.c_plus)), d).witness_r;
    try {
      const auto pack = build_witness(c.curve, U, r, d, grid);
      if (!pack.warning.empty()) {
        notes << "# warning delta=" << num(d) << ": " << pack.warning << '\n';
        res.warnings.push_back(pack.warning);
      }
      if (!check_tubes(pack).disjoint) {
        res.warnings.push_back("tubes overlap at delta=" + num(d));
        res.exit_code = 3;
      }
      const auto w = witness_ratio(pack, c.p, kind);
      rows.push_back({d, static_cast<std::int64_t>(pack.separated_set.size()), w.ratio, w.predicted});
      if (w.predicted > 0.0) {
        const double q = w.ratio / w.predicted;
        lo = lo == 0.0 ? q : std::min(lo, q);
        hi = std::max(hi, q);
      }
    } catch (const ResolutionError& e) {
      notes << "# skipped delta=" << num(d) << ": " << e.what() << '\n';
      res.warnings.push_back(e.what());
    }
  }
  std::ostringstream os;
  write_witness_csv(os, rows);
  os << notes.str();
  os << "# summary ratio_over_predicted_spread=" << (lo > 0.0 ? num(hi / lo) : std::string("n/a")) << '\n';
  res.csv = os.str();
  return res;
}

RunResult run_maxop(const ExperimentConfig& c) {
  auto f = random_band_limited_field(c.grid_n, c.grid_L, band_of(c), c.seed);
  const auto kind = c.op_kind == "average" ? FamilyKind::average : FamilyKind::hilbert;
  std::optional<MaxOpOptions> opt;
  if (!c.R_grid.empty()) opt = MaxOpOptions{c.R_grid, c.R_substeps};
  const auto g = family_max(c.curve, c.u_samples, f, kind, QuadratureScheme::midpoint(c.quadrature_nodes), opt);
  RunResult res;
  std::ostringstream os;
  write_line_cut_csv(os, g, 0, c.grid_n / 2);
  os << "# summary p=" << num(c.p) << " lp_ratio=" << num(g.lp_norm(c.p) / f.lp_norm(c.p)) << '\n';
  res.csv = os.str();
  return res;
}

RunResult run(std::string_view sub, const ExperimentConfig& cfg) {
  if (sub == "setinfo") return run_setinfo(cfg);
  if (sub == "fourier") return run_fourier(cfg);
  if (sub == "decompose") return run_decompose(cfg);
  if (sub == "witness") return run_witness(cfg);
  if (sub == "maxop") return run_maxop(cfg);
  throw ParameterError("unknown subcommand '" + std::string(sub) + "'");
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw DataError("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw DataError("cannot move output into " + path.string() + ": " + ec.message());
  }
}

std::filesystem::path execute(std::string_view sub, const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                              int* exit_code) {
  validate_for(cfg, sub);
  const auto res = run(sub, cfg);
  if (exit_code) *exit_code = res.exit_code;
  const auto path = out_dir / (cfg.output.empty() ? std::string(sub) + ".csv" : cfg.output);
  if (res.exit_code != 0) return path;
  const std::string canon = std::string(sub) + '\n' + cfg.canonical();
  std::string content = "# curvemax " + std::string(sub) + "\n# config_hash=fnv1a64:" + hex64(fnv1a64(canon)) +
                        "\n# seed=" + std::to_string(cfg.seed) + '\n' + res.csv;
  std::filesystem::create_directories(out_dir);
  write_atomic(path, content);
  return path;
}

}  // namespace curvemax::cli
