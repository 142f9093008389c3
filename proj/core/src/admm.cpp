#include "proxis/admm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "proxis/error.hpp"

namespace proxis {

void AdmmParams::validate() const {
  if (!(rho > 0.0)) throw std::invalid_argument("AdmmParams: rho must be > 0");
  if (max_iters < 1) throw std::invalid_argument("AdmmParams: max_iters must be >= 1");
  if (!(eps_abs > 0.0) || !(eps_rel > 0.0)) {
    throw std::invalid_argument("AdmmParams: tolerances must be > 0");
  }
}

void LeastSquaresModel::validate() const {
  if (!A) throw std::invalid_argument("LeastSquaresModel: forward map is required");
  if (!(lambda > 0.0)) throw std::invalid_argument("LeastSquaresModel: lambda must be > 0");
  if (!(delta >= 0.0)) throw std::invalid_argument("LeastSquaresModel: delta must be >= 0");
  if (L && L->cols() != A->cols()) {
    throw DimensionError("LeastSquaresModel: L and A have different column counts");
  }
  f.validate(A->cols());
}

// ------------------------------------------------------------ x-update

namespace {

// Adds w * S^T S into the lower triangle of `m`.
void accumulate_gram(Matrix& m, const SparseMatrix& s, double w) {
  for (Index r = 0; r < s.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator p(s, r); p; ++p) {
      const double wp = w * p.value();
      for (SparseMatrix::InnerIterator q(s, r); q; ++q) {
        if (q.col() > p.col()) continue;
        m(p.col(), q.col()) += wp * q.value();
      }
    }
  }
}

}  // namespace

XUpdateSolver::XUpdateSolver(const LeastSquaresModel& model, double rho, Method method)
    : n_(model.dim()) {
  pieces_.emplace_back(model.lambda, model.A->to_sparse());
  if (model.L && model.delta > 0.0) pieces_.emplace_back(model.delta, model.L->to_sparse());
  for (const Term& t : model.f.terms()) {
    if (t.transform) {
      pieces_.emplace_back(rho, t.transform->to_sparse());
    } else {
      identity_weight_ += rho;
    }
  }

  method_ = method;
  if (method_ == Method::automatic) {
    method_ = n_ <= kDenseLimit ? Method::dense_cholesky : Method::conjugate_gradient;
  }
  if (method_ == Method::dense_cholesky) {
    Matrix m = Matrix::Zero(n_, n_);
    for (const auto& [w, s] : pieces_) accumulate_gram(m, s, w);
    m.diagonal().array() += identity_weight_;
    llt_.compute(m);
    // Rounding can leave a tiny positive pivot on an exactly singular system.
    const double scale = m.diagonal().cwiseAbs().maxCoeff();
    if (llt_.info() != Eigen::Success ||
        llt_.matrixLLT().diagonal().array().square().minCoeff() <= 1e-13 * scale) {
      throw SingularSystemError("x-update system is not positive definite");
    }
    pieces_.clear();
  }
}

void XUpdateSolver::apply_system(const Vector& v, Vector& out) const {
  out = identity_weight_ * v;
  for (const auto& [w, s] : pieces_) {
    const Vector sv = s * v;
    out.noalias() += w * (s.transpose() * sv);
  }
}

Vector XUpdateSolver::multiply(const Vector& v) const {
  if (v.size() != n_) throw DimensionError("XUpdateSolver::multiply: wrong length");
  if (method_ == Method::dense_cholesky) return llt_.matrixL() * (llt_.matrixU() * v);
  Vector out;
  apply_system(v, out);
  return out;
}

void XUpdateSolver::cg(const Vector& rhs, Eigen::Ref<Vector> x) const {
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    x.setZero();
    return;
  }
  Vector ax;
  apply_system(x, ax);
  Vector r = rhs - ax;
  Vector p = r;
  Vector ap(n_);
  double rr = r.squaredNorm();
  const double target = kCgTolerance * rhs_norm;
  const Index max_iter = 10 * n_;
  for (Index it = 0; it < max_iter; ++it) {
    if (std::sqrt(rr) <= target) return;
    apply_system(p, ap);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) throw SingularSystemError("x-update system is not positive definite");
    const double alpha = rr / pap;
    x += alpha * p;
    r -= alpha * ap;
    const double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  if (std::sqrt(rr) > target) {
    throw ConvergenceError("conjugate gradient did not converge in " + std::to_string(max_iter) +
                           " iterations");
  }
}

void XUpdateSolver::solve(const Matrix& rhs, Matrix& x) const {
  if (rhs.rows() != n_) throw DimensionError("XUpdateSolver::solve: wrong rhs length");
  if (method_ == Method::dense_cholesky) {
    x = rhs;
    llt_.solveInPlace(x);
    return;
  }
  if (x.rows() != n_ || x.cols() != rhs.cols()) x = Matrix::Zero(n_, rhs.cols());
  for (Index j = 0; j < rhs.cols(); ++j) cg(rhs.col(j), x.col(j));
}

Vector XUpdateSolver::solve(const Vector& rhs) const {
  Matrix x = Matrix::Zero(n_, 1);
  solve(Matrix(rhs), x);
  return x.col(0);
}

// ----------------------------------------------------------------- ADMM

AdmmSolver::AdmmSolver(LeastSquaresModel model, AdmmParams params, XUpdateSolver::Method method)
    : model_(std::move(model)), params_(params) {
  model_.validate();
  params_.validate();
  xsolver_ = std::make_shared<XUpdateSolver>(model_, params_.rho, method);
  a_ = model_.A->to_sparse();
  if (model_.L) l_ = model_.L->to_sparse();
  for (const Term& t : model_.f.terms()) {
    transforms_.push_back(t.transform ? t.transform->to_sparse() : SparseMatrix());
  }
  clamp_ = model_.f.identity_bounds(clamp_lo_, clamp_hi_);
}

double AdmmSolver::objective(const Vector& x, const Vector& b, const Vector& c) const {
  const ExtendedReal fx = model_.f.eval(x);
  if (!fx.finite) return std::numeric_limits<double>::infinity();
  double value = 0.5 * model_.lambda * (a_ * x - b).squaredNorm() + fx.value;
  if (model_.L && model_.delta > 0.0) {
    const Vector lx = l_ * x;
    value += 0.5 * model_.delta * (c.size() == 0 ? lx.squaredNorm() : (lx - c).squaredNorm());
  }
  return value;
}

AdmmResult AdmmSolver::solve(const Vector& b, const Vector& c, AdmmState* state) const {
  Matrix cm;
  if (c.size() != 0) cm = c;
  auto results = run(b, cm, state);
  return std::move(results.front());
}

std::vector<AdmmResult> AdmmSolver::solve_batch(const Matrix& B, const Matrix& C) const {
  return run(B, C, nullptr);
}

std::vector<AdmmResult> AdmmSolver::run(const Matrix& B, const Matrix& C, AdmmState* state) const {
  const Index n = model_.dim();
  const Index nb = B.cols();
  const bool use_prior = model_.L && model_.delta > 0.0;
  if (B.rows() != model_.A->rows()) throw DimensionError("AdmmSolver: data has wrong length");
  if (C.size() != 0 && (!model_.L || C.rows() != model_.L->rows() || C.cols() != nb)) {
    throw DimensionError("AdmmSolver: prior mean has wrong shape");
  }

  Matrix rhs0 = model_.lambda * (a_.transpose() * B);
  if (use_prior && C.size() != 0) rhs0 += model_.delta * (l_.transpose() * C);

  const auto& terms = model_.f.terms();
  const std::size_t k = terms.size();
  std::vector<AdmmResult> results(static_cast<std::size_t>(nb));
  Matrix X = Matrix::Zero(n, nb);

  auto finish = [&](Index j) {
    AdmmResult& res = results[static_cast<std::size_t>(j)];
    res.x = X.col(j);
    if (clamp_) prox_box_inplace(res.x, clamp_lo_, clamp_hi_);
    const Vector cj = C.size() != 0 ? Vector(C.col(j)) : Vector();
    res.objective = objective(res.x, B.col(j), cj);
  };

  if (k == 0) {
    xsolver_->solve(rhs0, X);
    if (!X.allFinite()) throw DivergenceError("AdmmSolver: non-finite solution");
    for (Index j = 0; j < nb; ++j) {
      results[static_cast<std::size_t>(j)].iters = 1;
      results[static_cast<std::size_t>(j)].converged = true;
      finish(j);
    }
    return results;
  }

  auto apply_t = [&](std::size_t i, const Matrix& m) -> Matrix {
    return transforms_[i].size() == 0 ? m : Matrix(transforms_[i] * m);
  };
  auto adjoint_t = [&](std::size_t i, const Matrix& m) -> Matrix {
    return transforms_[i].size() == 0 ? m : Matrix(transforms_[i].transpose() * m);
  };

  std::vector<Matrix> Y(k), U(k), LX(k), Yold(k);
  Index p = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const Index m = terms[i].output_dim(n);
    p += m;
    Y[i] = Matrix::Zero(m, nb);
    U[i] = Matrix::Zero(m, nb);
  }
  if (params_.warm_start && state && nb == 1 && state->y.size() == k && state->u.size() == k) {
    for (std::size_t i = 0; i < k; ++i) {
      if (state->y[i].size() == Y[i].rows() && state->u[i].size() == U[i].rows()) {
        Y[i].col(0) = state->y[i];
        U[i].col(0) = state->u[i];
      }
    }
  }

  const double rho = params_.rho;
  const double sqrt_p = std::sqrt(static_cast<double>(p));
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  std::vector<char> active(static_cast<std::size_t>(nb), 1);
  Index n_active = nb;
  Matrix Xnew = X;

  for (int it = 1; it <= params_.max_iters && n_active > 0; ++it) {
    Matrix rhs = rhs0;
    for (std::size_t i = 0; i < k; ++i) rhs.noalias() += rho * adjoint_t(i, Y[i] - U[i]);
    xsolver_->solve(rhs, Xnew);
    for (Index j = 0; j < nb; ++j) {
      if (!active[static_cast<std::size_t>(j)]) continue;
      if (!Xnew.col(j).allFinite()) {
        throw DivergenceError("AdmmSolver: non-finite iterate at iteration " + std::to_string(it));
      }
      X.col(j) = Xnew.col(j);
    }

    Vector lx_sq = Vector::Zero(nb), y_sq = Vector::Zero(nb), r_sq = Vector::Zero(nb);
    Matrix dual = Matrix::Zero(n, nb);
    Matrix dual_scale = Matrix::Zero(n, nb);
    for (std::size_t i = 0; i < k; ++i) {
      LX[i] = apply_t(i, X);
      Yold[i] = Y[i];
      const double t = terms[i].weight / rho;
      for (Index j = 0; j < nb; ++j) {
        if (!active[static_cast<std::size_t>(j)]) continue;
        Y[i].col(j) = LX[i].col(j) + U[i].col(j);
        prox_atom_inplace(terms[i].atom, Y[i].col(j), t);
        U[i].col(j) += LX[i].col(j) - Y[i].col(j);
      }
      lx_sq += LX[i].colwise().squaredNorm().transpose();
      y_sq += Y[i].colwise().squaredNorm().transpose();
      r_sq += (LX[i] - Y[i]).colwise().squaredNorm().transpose();
      dual += adjoint_t(i, Y[i] - Yold[i]);
      dual_scale += adjoint_t(i, U[i]);
    }

    for (Index j = 0; j < nb; ++j) {
      if (!active[static_cast<std::size_t>(j)]) continue;
      AdmmResult& res = results[static_cast<std::size_t>(j)];
      res.iters = it;
      res.primal_residual = std::sqrt(r_sq[j]);
      res.dual_residual = rho * dual.col(j).norm();
      if (params_.record_history) {
        res.primal_history.push_back(res.primal_residual);
        res.dual_history.push_back(res.dual_residual);
      }
      if (params_.fixed_iterations) continue;
      const double eps_pri =
          sqrt_p * params_.eps_abs + params_.eps_rel * std::sqrt(std::max(lx_sq[j], y_sq[j]));
      const double eps_dual =
          sqrt_n * params_.eps_abs + params_.eps_rel * rho * dual_scale.col(j).norm();
      if (res.primal_residual <= eps_pri && res.dual_residual <= eps_dual) {
        res.converged = true;
        active[static_cast<std::size_t>(j)] = 0;
        --n_active;
      }
    }
  }

  for (Index j = 0; j < nb; ++j) finish(j);
  if (state && nb == 1) {
    state->y.resize(k);
    state->u.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      state->y[i] = Y[i].col(0);
      state->u[i] = U[i].col(0);
    }
  }
  return results;
}

AdmmResult admm_solve(const LeastSquaresModel& model, const Vector& b, const Vector& c,
                      const AdmmParams& params, AdmmState* state) {
  const AdmmSolver solver(model, params);
  return solver.solve(b, c, state);
}

}  // namespace proxis
