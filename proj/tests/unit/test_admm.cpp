#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "proxis/admm.hpp"
#include "proxis/error.hpp"
#include "proxis/prox.hpp"
#include "proxis/rng.hpp"

using namespace proxis;

namespace {

AdmmParams tight(double rho = 1.0) {
  AdmmParams p;
  p.rho = rho;
  p.max_iters = 20000;
  p.eps_abs = 1e-12;
  p.eps_rel = 1e-12;
  return p;
}

}  // namespace

TEST_CASE("A = I with an l1 term reproduces soft thresholding") {
  Rng rng = make_rng(31);
  const Vector b = standard_normal(rng, 30);
  LeastSquaresModel m{make_identity(30), 1.0, nullptr, 0.0, Regularizer::l1(0.4)};
  const AdmmResult r = admm_solve(m, b, {}, tight());
  CHECK((r.x - prox_l1(b, 0.4)).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(r.converged);
  CHECK(r.iters <= 20000);
  CHECK(r.primal_residual >= 0.0);
  CHECK(r.dual_residual >= 0.0);
}

TEST_CASE("A = I with 1D TV reproduces the direct TV prox") {
  Rng rng = make_rng(32);
  const Vector b = standard_normal(rng, 40);
  LeastSquaresModel m{make_identity(40), 1.0, nullptr, 0.0, Regularizer::tv1d(40, 0.3)};
  const AdmmResult r = admm_solve(m, b, {}, tight());
  CHECK((r.x - prox_tv1d(b, 0.3)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("quadratic regularizer matches the normal-equation closed form") {
  Rng rng = make_rng(33);
  const Matrix Am = Matrix::Random(8, 5);
  const Vector b = standard_normal(rng, 8);
  const Vector d = standard_normal(rng, 5);
  LeastSquaresModel m{make_dense(Am), 2.0, nullptr, 0.0,
                      Regularizer::tikhonov(make_identity(5), d, 3.0)};
  const AdmmResult r = admm_solve(m, b, {}, tight());
  const Matrix H = 2.0 * Am.transpose() * Am + 3.0 * Matrix::Identity(5, 5);
  const Vector want = H.llt().solve(2.0 * Am.transpose() * b + 3.0 * d);
  CHECK((r.x - want).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("first-order optimality with prior term and nonneg + TV") {
  Rng rng = make_rng(34);
  const Index n = 12;
  const Matrix Am = Matrix::Random(15, n);
  const Vector b = standard_normal(rng, 15);
  const Vector c = standard_normal(rng, n - 1);
  LeastSquaresModel m{make_dense(Am), 1.5, make_finite_difference(n), 0.7,
                      Regularizer::tv1d(n, 0.2, true)};
  const AdmmResult r = admm_solve(m, b, c, tight(2.0));
  const Matrix D = oracle::difference_matrix(n);
  const Vector grad = 1.5 * Am.transpose() * (Am * r.x - b) + 0.7 * D.transpose() * (D * r.x - c);
  // Forward-backward fixed point; the prox of step * (0.2 TV + nonneg) is the
  // TV prox followed by clipping at zero.
  const double step = 1e-3;
  const Vector fixed = prox_tv1d(r.x - step * grad, 0.2 * step).cwiseMax(0.0);
  CHECK((fixed - r.x).norm() / step <= 1e-6 * std::max(1.0, grad.norm()));
  CHECK(r.x.minCoeff() >= 0.0);
}

TEST_CASE("combined residual shrinks by 1e-6 within 5000 iterations") {
  Rng rng = make_rng(35);
  const Matrix Am = Matrix::Random(20, 10);
  const Vector b = standard_normal(rng, 20);
  LeastSquaresModel m{make_dense(Am), 1.0, nullptr, 0.0, Regularizer::tv1d(10, 0.5)};
  AdmmParams p;
  p.rho = 2.0;
  p.max_iters = 5000;
  p.fixed_iterations = true;
  p.record_history = true;
  const AdmmResult r = admm_solve(m, b, {}, p);
  REQUIRE(r.primal_history.size() == 5000);
  const double first = std::hypot(r.primal_history.front(), r.dual_history.front());
  const double last = std::hypot(r.primal_history.back(), r.dual_history.back());
  CHECK(last * last <= 1e-6 * first * first);
  CHECK(r.iters == 5000);
  CHECK_FALSE(r.converged);
}

TEST_CASE("determinism and batch equivalence") {
  const Matrix Am = Matrix::Random(9, 6);
  LeastSquaresModel m{make_dense(Am), 1.0, nullptr, 0.0, Regularizer::l1(0.3)};
  AdmmParams p;
  p.rho = 1.0;
  const AdmmSolver solver(m, p);
  const Matrix B = Matrix::Random(9, 4);
  const auto batch = solver.solve_batch(B, Matrix());
  for (Index j = 0; j < 4; ++j) {
    const AdmmResult single = solver.solve(B.col(j));
    CHECK(single.x == batch[static_cast<std::size_t>(j)].x);
    CHECK(single.iters == batch[static_cast<std::size_t>(j)].iters);
    CHECK(solver.solve(B.col(j)).x == single.x);
  }
}

TEST_CASE("warm start state is reused") {
  Rng rng = make_rng(37);
  const Vector b = standard_normal(rng, 25);
  LeastSquaresModel m{make_identity(25), 1.0, nullptr, 0.0, Regularizer::tv1d(25, 0.5)};
  AdmmParams p = tight();
  p.warm_start = true;
  const AdmmSolver solver(m, p);
  AdmmState state;
  const AdmmResult cold = solver.solve(b, {}, &state);
  const AdmmResult warm = solver.solve(b, {}, &state);
  CHECK(warm.iters < cold.iters);
  CHECK((warm.x - cold.x).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("x-update solver: identity, dense oracle, CG path") {
  LeastSquaresModel id{make_identity(7), 1.0, nullptr, 0.0, Regularizer{}};
  const XUpdateSolver sid(id, 1.0);
  Rng rng = make_rng(38);
  const Vector v = standard_normal(rng, 7);
  CHECK((sid.solve(v) - v).cwiseAbs().maxCoeff() <= 1e-15);

  const Matrix Am = Matrix::Random(60, 50);
  LeastSquaresModel m{make_dense(Am), 1.0, nullptr, 0.0, Regularizer::l1(1.0)};
  const Matrix H = Am.transpose() * Am + 3.0 * Matrix::Identity(50, 50);
  const Vector rhs = standard_normal(rng, 50);
  const Vector want = H.fullPivLu().solve(rhs);
  const XUpdateSolver dense(m, 3.0, XUpdateSolver::Method::dense_cholesky);
  const XUpdateSolver cg(m, 3.0, XUpdateSolver::Method::conjugate_gradient);
  CHECK((dense.solve(rhs) - want).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((cg.solve(rhs) - want).cwiseAbs().maxCoeff() <= 1e-8);
  const Vector first = dense.solve(rhs);
  for (int k = 0; k < 100; ++k) REQUIRE(dense.solve(rhs) == first);
  CHECK((dense.multiply(want) - rhs).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("singular x-update system is reported") {
  // A has a null space and the l1 transform is a single difference row.
  Matrix Am = Matrix::Zero(1, 3);
  Am(0, 0) = 1.0;
  Regularizer f;
  f.add(Term{1.0, make_dense(Matrix{{0.0, 1.0, -1.0}}), atom::L1{}});
  LeastSquaresModel m{make_dense(Am), 1.0, nullptr, 0.0, f};
  CHECK_THROWS_AS(AdmmSolver(m, AdmmParams{}, XUpdateSolver::Method::dense_cholesky), SingularSystemError);
}

TEST_CASE("parameter validation") {
  AdmmParams p;
  p.rho = 0.0;
  CHECK_THROWS(p.validate());
  p = AdmmParams{};
  p.eps_abs = -1.0;
  CHECK_THROWS(p.validate());
  CHECK_NOTHROW(AdmmParams{}.validate());
}

TEST_CASE("non-finite data is reported as divergence") {
  LeastSquaresModel m{make_identity(3), 1.0, nullptr, 0.0, Regularizer::l1(0.1)};
  Vector b{{1.0, std::nan(""), 0.0}};
  CHECK_THROWS_AS(admm_solve(m, b, {}, AdmmParams{}), DivergenceError);
}
