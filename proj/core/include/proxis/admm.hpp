#pragma once

#include <memory>
#include <vector>

#include <Eigen/Cholesky>

#include "proxis/linops.hpp"
#include "proxis/regularizer.hpp"

namespace proxis {

struct AdmmParams {
  double rho = 200.0;
  int max_iters = 5000;
  double eps_abs = 1e-9;
  double eps_rel = 1e-8;
  /// Run exactly max_iters iterations and skip the stopping test.
  bool fixed_iterations = false;
  /// Reuse the (y, u) state passed to solve() instead of zeros.
  bool warm_start = false;
  /// Keep per-iteration residual norms in AdmmResult.
  bool record_history = false;

  /// Throws std::invalid_argument on rho <= 0, tolerances <= 0 or max_iters < 1.
  void validate() const;
};

struct AdmmResult {
  Vector x;
  int iters = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  /// Objective at x; +inf if x violates a constraint that is not clamped.
  double objective = 0.0;
  bool converged = false;
  std::vector<double> primal_history;
  std::vector<double> dual_history;
};

/// Splitting variables of one solve, one (y_i, u_i) pair per regularizer term.
struct AdmmState {
  std::vector<Vector> y;
  std::vector<Vector> u;
};

/// lambda/2 ||A x - b||^2 + delta/2 ||L x - c||^2 + f(x). L may be null.
struct LeastSquaresModel {
  LinearMapPtr A;
  double lambda = 1.0;
  LinearMapPtr L;
  double delta = 0.0;
  Regularizer f;

  Index dim() const noexcept { return A->cols(); }
  void validate() const;
};

/// Solver for the symmetric positive-definite x-update system
/// (lambda A^T A + delta L^T L + rho sum_i L_i^T L_i) x = r.
///
/// Up to 4096 unknowns a dense Cholesky factorization is cached; above that a
/// matrix-free conjugate gradient iteration is used. solve() is const and may be
/// shared across threads.
class XUpdateSolver {
 public:
  enum class Method { automatic, dense_cholesky, conjugate_gradient };
  static constexpr Index kDenseLimit = 4096;

  XUpdateSolver(const LeastSquaresModel& model, double rho, Method method = Method::automatic);

  Index dim() const noexcept { return n_; }
  Method method() const noexcept { return method_; }

  /// Solves for every column of rhs. With conjugate gradients, `x` holds the
  /// starting guess on entry.
  void solve(const Matrix& rhs, Matrix& x) const;
  Vector solve(const Vector& rhs) const;

  /// system * v, for diagnostics and tests.
  Vector multiply(const Vector& v) const;

  static constexpr double kCgTolerance = 1e-10;

 private:
  void apply_system(const Vector& v, Vector& out) const;
  void cg(const Vector& rhs, Eigen::Ref<Vector> x) const;

  Index n_ = 0;
  Method method_ = Method::automatic;
  Eigen::LLT<Matrix> llt_;
  // Weighted pieces of the system for the matrix-free path.
  std::vector<std::pair<double, SparseMatrix>> pieces_;
  double identity_weight_ = 0.0;
};

/// ADMM for separable regularizers. Construct once per (model, rho); each
/// solve() is independent and may run concurrently with others.
class AdmmSolver {
 public:
  AdmmSolver(LeastSquaresModel model, AdmmParams params,
             XUpdateSolver::Method method = XUpdateSolver::Method::automatic);

  const LeastSquaresModel& model() const noexcept { return model_; }
  const AdmmParams& params() const noexcept { return params_; }
  const XUpdateSolver& xupdate() const noexcept { return *xsolver_; }

  /// Minimizes lambda/2 ||Ax - b||^2 + delta/2 ||Lx - c||^2 + f(x). `c` may be
  /// empty (zero). If params.warm_start and `state` is non-null and sized, the
  /// state seeds the iteration; the final state is written back to `state`.
  AdmmResult solve(const Vector& b, const Vector& c = Vector(), AdmmState* state = nullptr) const;

  /// Solves one problem per column of B (and C, which may be empty). Columns
  /// iterate in lockstep but stop individually.
  std::vector<AdmmResult> solve_batch(const Matrix& B, const Matrix& C) const;

  double objective(const Vector& x, const Vector& b, const Vector& c) const;

 private:
  std::vector<AdmmResult> run(const Matrix& B, const Matrix& C, AdmmState* state) const;

  LeastSquaresModel model_;
  AdmmParams params_;
  std::shared_ptr<const XUpdateSolver> xsolver_;
  SparseMatrix a_;
  SparseMatrix l_;
  std::vector<SparseMatrix> transforms_;  // empty matrix = identity
  double clamp_lo_ = 0.0;
  double clamp_hi_ = 0.0;
  bool clamp_ = false;
};

/// One-shot convenience wrapper.
AdmmResult admm_solve(const LeastSquaresModel& model, const Vector& b, const Vector& c,
                      const AdmmParams& params, AdmmState* state = nullptr);

}  // namespace proxis
