#include <CLI11.hpp>

#include <cstdint>
#include <string>

#include "lplab/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"lplab: optimal Bayesian estimators under L^p losses, batch experiments"};

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 1;

  app.add_option("config", config_path, "experiment config (JSON)")->required();
  app.add_option("--out", out_dir, "output directory (default: LPLAB_OUT_DIR or .)");
  app.add_option("--seed", seed, "seed override for seeded methods")
      ->each([&](const std::string&) { seed_given = true; });
  app.add_option("--jobs", jobs, "worker threads for internally parallel sweeps")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  lplab::cli::RunOptions opts;
  opts.out_dir = out_dir;
  if (seed_given) opts.seed_override = seed;
  opts.jobs = jobs;
  return lplab::cli::run_from_file(config_path, opts);
}
