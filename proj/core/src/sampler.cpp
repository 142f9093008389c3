#include "proxis/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include <Eigen/SVD>

#include "proxis/error.hpp"
#include "proxis/rng.hpp"

namespace proxis {

void RandomizedProblem::validate() const {
  if (!A) throw std::invalid_argument("RandomizedProblem: forward map is required");
  if (b.size() != A->rows()) throw DimensionError("RandomizedProblem: b has wrong length");
  if (!(lambda > 0.0)) throw std::invalid_argument("RandomizedProblem: lambda must be > 0");
  if (!(delta >= 0.0)) throw std::invalid_argument("RandomizedProblem: delta must be >= 0");
  if (L) {
    if (L->cols() != A->cols()) throw DimensionError("RandomizedProblem: L has wrong column count");
    if (c.size() != 0 && c.size() != L->rows()) {
      throw DimensionError("RandomizedProblem: c has wrong length");
    }
  } else if (c.size() != 0) {
    throw std::invalid_argument("RandomizedProblem: c given without L");
  }
  f.validate(A->cols());
}

void RandomizedProblem::check_identifiable() const {
  const Index n = A->cols();
  const Index m = A->rows() + (L ? L->rows() : 0);
  if (n > kDenseMaterializeLimit || A->rows() > kDenseMaterializeLimit ||
      (L && L->rows() > kDenseMaterializeLimit)) {
    return;
  }
  Matrix stacked(m, n);
  stacked.topRows(A->rows()) = A->to_dense();
  if (L) stacked.bottomRows(L->rows()) = L->to_dense();
  if (m < n) throw SingularSystemError("RandomizedProblem: fewer equations than unknowns");
  const Eigen::BDCSVD<Matrix> svd(stacked);
  // The Gaussian blur at its default width has sigma_min / sigma_max ~ 2e-14
  // while being positive definite, so the cutoff sits just above roundoff.
  const Vector& sv = svd.singularValues();
  if (!(sv[n - 1] > 1e-15 * sv[0])) {
    throw SingularSystemError("RandomizedProblem: Null(A) and Null(L) intersect nontrivially");
  }
}

LeastSquaresModel RandomizedProblem::model() const {
  LeastSquaresModel m;
  m.A = A;
  m.lambda = lambda;
  m.L = L;
  m.delta = L ? delta : 0.0;
  m.f = f;
  return m;
}

// ---------------------------------------------------------------- sampler

ImplicitSampler::ImplicitSampler(RandomizedProblem problem, AdmmParams params, SamplerOptions options)
    : problem_((problem.validate(), std::move(problem))),
      options_(options),
      solver_(problem_.model(), params, options.method) {
  if (options_.batch_size < 1) throw std::invalid_argument("SamplerOptions: batch_size must be >= 1");
}

std::pair<Vector, Vector> ImplicitSampler::perturb(std::uint64_t seed) const {
  Rng rb = make_rng(derive_seed(seed, seed_labels::perturb_data));
  Vector b_hat = problem_.b + standard_normal(rb, problem_.b.size()) / std::sqrt(problem_.lambda);
  Vector c_hat;
  if (problem_.L && problem_.delta > 0.0) {
    c_hat = problem_.c.size() != 0 ? problem_.c : Vector::Zero(problem_.L->rows());
    if (problem_.perturb_prior) {
      Rng rc = make_rng(derive_seed(seed, seed_labels::perturb_prior));
      c_hat += standard_normal(rc, c_hat.size()) / std::sqrt(problem_.delta);
    }
  }
  return {std::move(b_hat), std::move(c_hat)};
}

namespace {
SampleDiagnostics diagnostics_of(const AdmmResult& r) {
  return {r.iters, r.primal_residual, r.dual_residual, r.objective, r.converged};
}
}  // namespace

Sample ImplicitSampler::draw(std::uint64_t seed) const {
  auto [b_hat, c_hat] = perturb(seed);
  AdmmResult res = solver_.solve(b_hat, c_hat);
  Sample s;
  s.snapped = snap_to_face(problem_.f, res.x, options_.snap_tol);
  s.x = std::move(res.x);
  s.seed = seed;
  s.diagnostics = diagnostics_of(res);
  return s;
}

void ImplicitSampler::solve_batch(Index first, Index count, std::uint64_t master_seed,
                                  SampleEnsemble& out) const {
  const bool has_prior = problem_.L && problem_.delta > 0.0;
  Matrix B(problem_.A->rows(), count);
  Matrix C;
  if (has_prior) C.resize(problem_.L->rows(), count);
  for (Index j = 0; j < count; ++j) {
    const std::uint64_t seed = split_seed(master_seed, static_cast<std::uint64_t>(first + j));
    auto [b_hat, c_hat] = perturb(seed);
    B.col(j) = b_hat;
    if (has_prior) C.col(j) = c_hat;
    out.seeds[static_cast<std::size_t>(first + j)] = seed;
  }
  const std::vector<AdmmResult> res = solver_.solve_batch(B, C);
  for (Index j = 0; j < count; ++j) {
    const AdmmResult& r = res[static_cast<std::size_t>(j)];
    out.samples.row(first + j) = r.x.transpose();
    out.snapped.row(first + j) = snap_to_face(problem_.f, r.x, options_.snap_tol).transpose();
    out.diagnostics[static_cast<std::size_t>(first + j)] = diagnostics_of(r);
  }
}

SampleEnsemble ImplicitSampler::draw_ensemble(Index n_samples, std::uint64_t master_seed,
                                              int workers) const {
  if (n_samples < 1) throw std::invalid_argument("draw_ensemble: n_samples must be >= 1");
  const Index n = problem_.A->cols();
  SampleEnsemble out;
  out.samples.resize(n_samples, n);
  out.snapped.resize(n_samples, n);
  out.seeds.assign(static_cast<std::size_t>(n_samples), 0);
  out.diagnostics.assign(static_cast<std::size_t>(n_samples), {});
  out.snap_tol = options_.snap_tol;

  const Index bs = options_.batch_size;
  const Index n_batches = (n_samples + bs - 1) / bs;
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = static_cast<int>(std::min<Index>(workers, n_batches));

  std::atomic<Index> next{0};
  std::atomic<bool> failed{false};
  std::mutex err_mutex;
  std::string err_msg;

  auto worker = [&] {
    for (;;) {
      if (failed.load()) return;
      const Index batch = next.fetch_add(1);
      if (batch >= n_batches) return;
      const Index first = batch * bs;
      const Index count = std::min(bs, n_samples - first);
      try {
        solve_batch(first, count, master_seed, out);
      } catch (const std::exception& batch_error) {
        // Find the failing sample by redrawing the batch one sample at a time.
        std::string msg = batch_error.what();
        std::uint64_t bad_seed = split_seed(master_seed, static_cast<std::uint64_t>(first));
        for (Index j = 0; j < count; ++j) {
          const std::uint64_t seed = split_seed(master_seed, static_cast<std::uint64_t>(first + j));
          try {
            (void)draw(seed);
          } catch (const std::exception& e) {
            bad_seed = seed;
            msg = e.what();
            break;
          }
        }
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!failed.exchange(true)) {
          err_msg = "sample with seed " + std::to_string(bad_seed) + " failed: " + msg;
        }
        return;
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failed.load()) throw Error(err_msg);
  return out;
}

Sample draw(const RandomizedProblem& problem, const AdmmParams& params, std::uint64_t seed) {
  problem.validate();
  problem.check_identifiable();
  return ImplicitSampler(problem, params).draw(seed);
}

SampleEnsemble draw_ensemble(const RandomizedProblem& problem, const AdmmParams& params,
                             Index n_samples, std::uint64_t master_seed, int workers,
                             SamplerOptions options) {
  problem.validate();
  problem.check_identifiable();
  return ImplicitSampler(problem, params, options).draw_ensemble(n_samples, master_seed, workers);
}

Sample draw_underdetermined(const RandomizedProblem& problem, const AdmmParams& params,
                            std::uint64_t seed, SamplerOptions options) {
  if (problem.perturb_prior) {
    throw std::invalid_argument("draw_underdetermined: the prior term must not be randomized");
  }
  return ImplicitSampler(problem, params, options).draw(seed);
}

}  // namespace proxis
