#include <CLI11.hpp>

#include <iostream>

#include "curvemax/cli_harness.hpp"
#include "curvemax/common.hpp"

int main(int argc, char** argv) {
  CLI::App app{"curvemax: maximal and Hilbert operators along homogeneous curves"};
  app.require_subcommand(1);
  app.fallthrough();  // subcommands inherit this when created
  std::string config_path, out_dir = ".";
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "experiment config file (key = value)")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed for random fields (overrides the config)");
  for (const char* name : {"setinfo", "fourier", "decompose", "witness", "maxop"}) app.add_subcommand(name);
  CLI11_PARSE(app, argc, argv);

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    curvemax::set_thread_count(threads);
    auto cfg = curvemax::cli::load_config(config_path);
    if (seed) cfg.seed = *seed;
    int code = 0;
    const auto path = curvemax::cli::execute(sub, cfg, out_dir, &code);
    if (code != 0) {
      std::cerr << "curvemax: " << sub << " failed its consistency checks; nothing written\n";
      return code;
    }
    std::cout << path.string() << '\n';
    return 0;
  } catch (const curvemax::ParameterError& e) {
    std::cerr << "curvemax: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "curvemax: " << e.what() << '\n';
    return 1;
  }
}
