#pragma once

#include <cstdint>
#include <vector>

#include "proxis/admm.hpp"
#include "proxis/faces.hpp"
#include "proxis/linops.hpp"
#include "proxis/regularizer.hpp"

namespace proxis {

/// lambda/2 ||A x - b_hat||^2 + delta/2 ||L x - c_hat||^2 + f(x) with
/// b_hat ~ N(b, I/lambda) and, if perturb_prior, c_hat ~ N(c, I/delta).
struct RandomizedProblem {
  LinearMapPtr A;
  Vector b;
  double lambda = 1.0;
  LinearMapPtr L;  // optional
  Vector c;        // empty means zero
  double delta = 0.0;
  Regularizer f;
  bool perturb_prior = true;

  /// Shapes and parameter ranges. Throws std::invalid_argument or DimensionError.
  void validate() const;
  /// Null(A) and Null(L) intersect only in 0, checked by SVD when the operators
  /// are small enough to materialize and trusted otherwise. Throws
  /// SingularSystemError on failure.
  void check_identifiable() const;

  LeastSquaresModel model() const;
};

struct SampleDiagnostics {
  int iters = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
  bool converged = false;
};

struct Sample {
  Vector x;        // raw solver output
  Vector snapped;  // x moved onto its face
  std::uint64_t seed = 0;
  SampleDiagnostics diagnostics;
};

struct SampleEnsemble {
  Matrix samples;  // n_samples x n, raw
  Matrix snapped;  // n_samples x n
  std::vector<std::uint64_t> seeds;
  std::vector<SampleDiagnostics> diagnostics;
  double snap_tol = kDefaultSnapTolerance;

  Index size() const noexcept { return samples.rows(); }
};

struct SamplerOptions {
  double snap_tol = kDefaultSnapTolerance;
  /// Ensemble draws are solved in lockstep batches of this many consecutive
  /// sample indices. Batches never depend on the worker count.
  Index batch_size = 32;
  XUpdateSolver::Method method = XUpdateSolver::Method::automatic;
};

/// Perturb-then-optimize sampler. The ADMM x-update factorization is built
/// once and shared by every draw.
class ImplicitSampler {
 public:
  ImplicitSampler(RandomizedProblem problem, AdmmParams params, SamplerOptions options = {});

  const RandomizedProblem& problem() const noexcept { return problem_; }
  const AdmmSolver& solver() const noexcept { return solver_; }

  /// Perturbed (b_hat, c_hat) for a sample seed.
  std::pair<Vector, Vector> perturb(std::uint64_t seed) const;

  Sample draw(std::uint64_t seed) const;

  /// Sample i uses seed split_seed(master_seed, i). workers <= 0 selects the
  /// hardware concurrency.
  SampleEnsemble draw_ensemble(Index n_samples, std::uint64_t master_seed, int workers = 1) const;

 private:
  void solve_batch(Index first, Index count, std::uint64_t master_seed, SampleEnsemble& out) const;

  RandomizedProblem problem_;
  SamplerOptions options_;
  AdmmSolver solver_;
};

Sample draw(const RandomizedProblem& problem, const AdmmParams& params, std::uint64_t seed);

SampleEnsemble draw_ensemble(const RandomizedProblem& problem, const AdmmParams& params,
                             Index n_samples, std::uint64_t master_seed, int workers = 1,
                             SamplerOptions options = {});

/// Underdetermined variant: only b is randomized, so A may be rank deficient.
/// The caller asserts that f - delta/2 ||L x - c||^2 is convex. Requires
/// problem.perturb_prior == false.
Sample draw_underdetermined(const RandomizedProblem& problem, const AdmmParams& params,
                            std::uint64_t seed, SamplerOptions options = {});

/// Decides whether the subdifferential of f = gamma ||.||_1 at x0 meets
/// range(A^T), by alternating projections (at most 10000 rounds) between
/// range(A^T) and {v : v_i = gamma sign(x0_i) on the support, |v_i| <= gamma
/// elsewhere}. Components within `support_tol` (relative) of zero are off the
/// support. Throws UnsupportedRegularizerError for any other f.
bool check_source_condition(const LinearMap& A, const Regularizer& f, const Vector& x0,
                            double tol = 1e-8, double support_tol = kDefaultSnapTolerance);

}  // namespace proxis
