#include "proxis/self_check.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "proxis/linops.hpp"
#include "proxis/prox.hpp"
#include "proxis/rng.hpp"

namespace proxis {

namespace {

constexpr double kAdjointTol = 1e-10;
constexpr double kTvTol = 1e-8;
constexpr int kTvAdmmIterations = 50000;

Matrix random_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  std::normal_distribution<double> n01;
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = n01(rng);
  return m;
}

// Plain ADMM on min 1/2 ||z - v||^2 + t ||Dz||_1 with the split y = Dz.
Vector tv1d_by_admm(const Vector& v, double t, int iterations) {
  const Index n = v.size();
  Matrix D = Matrix::Zero(n - 1, n);
  for (Index i = 0; i + 1 < n; ++i) {
    D(i, i) = -1.0;
    D(i, i + 1) = 1.0;
  }
  const double rho = 1.0;
  const Eigen::LLT<Matrix> llt(Matrix::Identity(n, n) + rho * D.transpose() * D);
  Vector z = v, y = D * v, u = Vector::Zero(n - 1);
  for (int k = 0; k < iterations; ++k) {
    z = llt.solve(v + rho * D.transpose() * (y - u));
    const Vector w = D * z + u;
    y = w.array().sign() * (w.array().abs() - t / rho).max(0.0);
    u = w - y;
  }
  return z;
}

}  // namespace

std::vector<CheckResult> adjoint_suite(std::uint64_t seed, int pairs) {
  Rng rng = make_rng(seed);
  std::vector<LinearMapPtr> maps{
      make_identity(7),
      make_dense(random_matrix(6, 9, rng)),
      make_gaussian_blur_1d(64, 0.02, 1.0 / 64.0),
      make_finite_difference(50),
      make_finite_difference(9, 7),
      make_parallel_beam(16, 6, 20),
      make_vertical_stack({make_gaussian_blur_1d(30, 0.05, 1.0 / 30.0), make_finite_difference(30)}),
      make_scaled(-2.5, make_finite_difference(6, 8)),
  };
  std::vector<CheckResult> out;
  for (const auto& map : maps) {
    double worst = 0.0;
    for (int k = 0; k < pairs; ++k) {
      const Vector x = standard_normal(rng, map->cols());
      const Vector y = standard_normal(rng, map->rows());
      worst = std::max(worst, adjoint_mismatch(*map, x, y));
    }
    out.push_back({"adjoint/" + std::string(to_string(map->kind())), worst, kAdjointTol,
                   worst <= kAdjointTol});
  }
  return out;
}

std::vector<CheckResult> prox_suite(std::uint64_t seed, int inputs) {
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.1, 2.0);
  double l1_err = 0.0, box_err = 0.0, nonneg_err = 0.0, group_err = 0.0, tv_err = 0.0;
  for (int k = 0; k < inputs; ++k) {
    const Vector v = 2.0 * standard_normal(rng, 20);
    const double t = unif(rng);

    const Vector p1 = prox_l1(v, t);
    for (Index i = 0; i < v.size(); ++i) {
      const double want = v[i] > t ? v[i] - t : (v[i] < -t ? v[i] + t : 0.0);
      l1_err = std::max(l1_err, std::abs(p1[i] - want));
    }

    const Vector pb = prox_box(v, -0.5, 0.75);
    const Vector pn = prox_nonnegative(v);
    for (Index i = 0; i < v.size(); ++i) {
      box_err = std::max(box_err, std::abs(pb[i] - std::min(0.75, std::max(-0.5, v[i]))));
      nonneg_err = std::max(nonneg_err, std::abs(pn[i] - std::max(0.0, v[i])));
    }

    const BlockPartition blocks = BlockPartition::uniform(20, 4);
    const Vector pg = prox_group_l2(v, blocks, t);
    for (Index b = 0; b < blocks.num_blocks(); ++b) {
      const Vector vb = v.segment(4 * b, 4);
      double sq = 0.0;
      for (Index i = 0; i < 4; ++i) sq += vb[i] * vb[i];
      const double nrm = std::sqrt(sq);
      const Vector want = nrm > t ? Vector((1.0 - t / nrm) * vb) : Vector::Zero(4);
      group_err = std::max(group_err, (pg.segment(4 * b, 4) - want).cwiseAbs().maxCoeff());
    }

    const Vector ptv = prox_tv1d(v, t);
    tv_err = std::max(tv_err, (ptv - tv1d_by_admm(v, t, kTvAdmmIterations)).cwiseAbs().maxCoeff());
  }
  return {
      {"prox/l1", l1_err, 0.0, l1_err == 0.0},
      {"prox/box", box_err, 0.0, box_err == 0.0},
      {"prox/nonnegative", nonneg_err, 0.0, nonneg_err == 0.0},
      {"prox/group-l2", group_err, 0.0, group_err == 0.0},
      {"prox/tv1d-vs-admm", tv_err, kTvTol, tv_err <= kTvTol},
  };
}

bool all_pass(const std::vector<CheckResult>& results) noexcept {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.pass; });
}

}  // namespace proxis
