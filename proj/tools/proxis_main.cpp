// proxis: run experiments, render plots, and run the operator self-checks.

#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "proxis/config.hpp"
#include "proxis/experiments.hpp"
#include "proxis/plot.hpp"
#include "proxis/self_check.hpp"

namespace {

int report_checks(const std::vector<proxis::CheckResult>& results) {
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << "  error=" << r.value
              << "  tol=" << r.tolerance << '\n';
  }
  return proxis::all_pass(results) ? EXIT_SUCCESS : EXIT_FAILURE;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proxis: sampling regularized Gaussians by perturb-then-optimize"};
  app.set_version_flag("--version", std::string(proxis::version()));
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int workers = 0;
  run->add_option("config", config_path, "INI config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (default: output.dir from the config)");
  run->add_option("--seed", seed, "Override the master seed");
  run->add_option("--workers", workers, "Worker threads (default: PROXIS_WORKERS or 1)")
      ->check(CLI::NonNegativeNumber);

  auto* plot = app.add_subcommand("plot", "Render SVG plots from a finished run directory");
  std::string run_dir;
  std::string which;
  plot->add_option("run-dir", run_dir, "Run directory")->required();
  plot->add_option("--which", which, "signal | median | ci-width | sparsity-hist | hyper-trace")
      ->required();

  auto* check = app.add_subcommand("check", "Run a self-test suite");
  std::string suite;
  std::uint64_t check_seed = 1;
  check->add_option("suite", suite, "adjoint | prox")->required()->check(CLI::IsMember({"adjoint", "prox"}));
  check->add_option("--seed", check_seed, "Seed for the random test inputs");

  auto* init = app.add_subcommand("init", "Print the default config of an experiment");
  std::string experiment;
  init->add_option("experiment", experiment,
                   "deblur1d | ct | gibbs-deblur | prox-check | adjoint-check | compare-baseline")
      ->required();
  bool full_scale = false;
  init->add_flag("--full-scale", full_scale, "Use the original problem sizes (CT: 100x100, 500 samples)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      proxis::RunConfig config = proxis::load_config(config_path);
      if (seed) config.seed = *seed;
      const auto outcome = proxis::run_experiment(config, out_dir, workers);
      std::cout << "run directory: " << outcome.dir.string() << '\n'
                << "wall time: " << outcome.wall_seconds << " s\n";
      for (const auto& [k, v] : outcome.metrics) std::cout << "  " << k << " = " << v << '\n';
      if (!outcome.ok) {
        std::cerr << "run FAILED: " << outcome.error << '\n';
        return EXIT_FAILURE;
      }
      return EXIT_SUCCESS;
    }
    if (*plot) {
      std::cout << proxis::plot(run_dir, proxis::parse_plot_kind(which)).string() << '\n';
      return EXIT_SUCCESS;
    }
    if (*check) {
      return report_checks(suite == "adjoint" ? proxis::adjoint_suite(check_seed)
                                              : proxis::prox_suite(check_seed));
    }
    if (*init) {
      for (auto e : {proxis::Experiment::deblur1d, proxis::Experiment::ct, proxis::Experiment::gibbs_deblur,
                     proxis::Experiment::prox_check, proxis::Experiment::adjoint_check,
                     proxis::Experiment::compare_baseline}) {
        if (proxis::to_string(e) == experiment) {
          std::cout << proxis::save_config(full_scale ? proxis::full_scale_config(e)
                                                        : proxis::default_config(e));
          return EXIT_SUCCESS;
        }
      }
      std::cerr << "unknown experiment '" << experiment << "'\n";
      return EXIT_FAILURE;
    }
  } catch (const proxis::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
