#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "proxis/error.hpp"

namespace proxis {

class PlotError : public Error {
 public:
  using Error::Error;
};

enum class PlotKind { signal, median, ci_width, sparsity_hist, hyper_trace };

std::string to_string(PlotKind k);
/// Accepts signal, median, ci-width, sparsity-hist, hyper-trace.
PlotKind parse_plot_kind(const std::string& name);

/// Renders `run_dir`/plots/<name>.svg from the CSV files of a finished run.
/// Throws PlotError if the needed CSV is missing or malformed.
std::filesystem::path plot(const std::filesystem::path& run_dir, PlotKind kind);

/// Renders every plot the run directory has data for. Failures are collected
/// in `errors` and never thrown.
std::vector<std::filesystem::path> plot_available(const std::filesystem::path& run_dir,
                                                  std::vector<std::string>* errors = nullptr);

/// Minimal numeric CSV table: a header row and rows of numbers.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Column by name; throws PlotError if absent.
  std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path, bool has_header = true);

}  // namespace proxis
