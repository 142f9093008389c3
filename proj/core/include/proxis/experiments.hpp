#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "proxis/config.hpp"

namespace proxis {

std::string_view version() noexcept;

/// Worker count: an explicit positive value wins, then config.workers, then
/// the PROXIS_WORKERS environment variable, then 1.
int resolve_workers(int requested, const RunConfig& config);

struct RunOutcome {
  std::filesystem::path dir;
  bool ok = false;
  std::string error;  // set when ok is false
  double wall_seconds = 0.0;
  std::map<std::string, double> metrics;
};

/// Executes config.experiment and writes its artifacts into `out_dir`
/// (config.output_dir when empty). Validation errors throw ConfigError before
/// anything is written; compute errors leave the files written so far plus a
/// FAILED marker and are reported through the outcome.
RunOutcome run_experiment(const RunConfig& config, const std::filesystem::path& out_dir = {},
                          int workers = 0);

/// Fraction of rows containing at least one adjacent pair with
/// |x[i+1] - x[i]| <= tol.
double fraction_with_flat_pair(const Matrix& rows, double tol);

}  // namespace proxis
