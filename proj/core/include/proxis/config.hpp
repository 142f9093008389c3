#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "proxis/admm.hpp"
#include "proxis/error.hpp"
#include "proxis/gibbs.hpp"
#include "proxis/regularizer.hpp"

namespace proxis {

/// Lists every violation found while loading or validating a config.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

enum class Experiment { deblur1d, ct, gibbs_deblur, prox_check, adjoint_check, compare_baseline };

std::string to_string(Experiment e);

/// Regularizer family used by the experiments.
struct RegularizerSpec {
  std::string kind = "tv";  // tv | isotropic-tv | l1 | none
  bool nonnegative = false;
  double gamma = 20.0;

  bool operator==(const RegularizerSpec&) const = default;
};

struct RunConfig {
  Experiment experiment = Experiment::deblur1d;
  std::uint64_t seed = 1;
  int workers = 0;  // 0: PROXIS_WORKERS or 1

  // problem
  int n = 128;
  double sigma = 0.02;
  double lambda = 1000.0;
  int n_angles = 20;
  int n_rays = 120;

  // solver
  AdmmParams admm;
  std::string xupdate = "auto";  // auto | dense | cg

  // sampler
  int n_samples = 500;
  int batch_size = 32;
  double snap_tol = 1e-6;
  double level = 0.95;

  RegularizerSpec regularizer;
  HyperPriors priors;

  // gibbs
  std::string gibbs_model = "alternative";  // alternative | scaled
  int gibbs_iterations = 1000;
  int gibbs_burn_in = 100;

  // baseline
  int rwm_steps = 200000;
  int rwm_burn_in = 20000;
  int rwm_thin = 400;
  double rwm_step = 0.01;

  std::string output_dir = "runs/out";

  bool operator==(const RunConfig& o) const;

  /// Throws ConfigError listing every invalid field.
  void validate() const;
};

/// Defaults for each experiment (the desk-scale settings).
RunConfig default_config(Experiment e);

/// Original problem sizes (CT: 100x100 image, 120 rays, 500 samples). Other
/// experiments already run at that size and return their defaults.
RunConfig full_scale_config(Experiment e);

/// INI text with one section per module.
std::string save_config(const RunConfig& c);
RunConfig load_config_string(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
void write_config(const RunConfig& c, const std::filesystem::path& path);

/// Builds the regularizer for an n-dimensional signal (ny == 1) or an
/// nx-by-ny image.
Regularizer build_regularizer(const RegularizerSpec& spec, Index nx, Index ny = 1);

XUpdateSolver::Method parse_xupdate_method(const std::string& s);

}  // namespace proxis
