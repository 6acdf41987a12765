#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curvemax/cutoffs.hpp"
#include "curvemax/dilation_sets.hpp"

namespace curvemax::cli {

/// Resolved experiment description. Every field has a default; the config
/// file overrides them with `section.key = value` lines.
struct ExperimentConfig {
  HomogeneousCurve curve;

  std::string set_kind = "interval";  // interval | points | lacunary | cantor | convex
  double interval_a1 = 1.0, interval_a2 = 2.0;
  std::vector<double> points{1.0};
  double lacunary_lambda = 2.0;
  std::optional<std::int64_t> lacunary_k_min, lacunary_k_max;
  int cantor_copies = 2;
  double cantor_ratio = 1.0 / 3.0;
  int cantor_level = 9;
  double convex_a = 1.0;
  std::int64_t convex_n_max = 10000;

  std::size_t grid_n = 512;
  double grid_L = 32.0;

  std::string op_kind = "hilbert";  // hilbert | average
  double p = 2.0;
  int j_min = 0, j_max = 0;
  int ell_min = 1, ell_max = 8;
  std::vector<double> u_samples{1.0};
  std::vector<double> R_grid;  // empty: default grid
  int R_substeps = 8;
  int quadrature_nodes = 64;

  std::string symbol = "tau0_hat";
  double direction1 = 0.0, direction2 = 1.0;

  std::optional<double> witness_r;  // empty: the sup-covering witness r
  double band = 0.0;                // 0: the Nyquist radius pi n / L

  std::string experiment_name;
  std::vector<double> scales;
  std::string output;

  std::uint64_t seed = 1;

  std::string source = "config";
  std::map<std::string, int> key_lines;  // key -> line it was set on

  [[nodiscard]] dilation::DilationSet make_set() const;
  /// Canonical `key=value` listing of every resolved field.
  [[nodiscard]] std::string canonical() const;
};

/// Parses `key = value` lines; '#' starts a comment. Errors carry
/// `<source>:<line>:` prefixes. Unknown and duplicate keys are rejected.
ExperimentConfig parse_config(std::string_view text, std::string_view source = "config");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Checks that apply only to one subcommand; throws ParameterError.
void validate_for(const ExperimentConfig& cfg, std::string_view subcommand);

[[nodiscard]] std::uint64_t fnv1a64(std::string_view data);

struct RunResult {
  std::string csv;
  int exit_code = 0;
  std::vector<std::string> warnings;
};

RunResult run_setinfo(const ExperimentConfig& cfg);
RunResult run_fourier(const ExperimentConfig& cfg);
RunResult run_decompose(const ExperimentConfig& cfg);
RunResult run_witness(const ExperimentConfig& cfg);
RunResult run_maxop(const ExperimentConfig& cfg);

RunResult run(std::string_view subcommand, const ExperimentConfig& cfg);

/// Writes `content` next to `path` and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// Validates, runs, prefixes the comment header and writes the CSV into
/// out_dir. Returns the path written; nothing is written on error.
std::filesystem::path execute(std::string_view subcommand, const ExperimentConfig& cfg,
                              const std::filesystem::path& out_dir, int* exit_code = nullptr);

}  // namespace curvemax::cli
