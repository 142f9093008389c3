// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failures (capped at 1).

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include "oracles.hpp"
#include "proxis/config.hpp"
#include "proxis/experiments.hpp"
#include "proxis/faces.hpp"
#include "proxis/gibbs.hpp"
#include "proxis/linops.hpp"
#include "proxis/plot.hpp"
#include "proxis/prox.hpp"
#include "proxis/sample_io.hpp"
#include "proxis/sampler.hpp"

namespace fs = std::filesystem;
using proxis::Index;
using proxis::Matrix;
using proxis::Vector;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;  // <= 0: none
  std::function<Verdict()> run;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

std::string slurp_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Rows with some adjacent pair at distance <= tol.
double flat_pair_fraction(const Matrix& rows, double tol) {
  Index hits = 0;
  for (Index i = 0; i < rows.rows(); ++i) {
    bool any = false;
    for (Index j = 0; j + 1 < rows.cols() && !any; ++j) any = std::abs(rows(i, j + 1) - rows(i, j)) <= tol;
    hits += any;
  }
  return rows.rows() ? static_cast<double>(hits) / static_cast<double>(rows.rows()) : 0.0;
}

Matrix grid_from_csv(const fs::path& p) {
  const proxis::CsvTable t = proxis::read_csv(p, false);
  Matrix m(static_cast<Index>(t.rows.size()), static_cast<Index>(t.rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = t.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

proxis::AdmmParams tight(double rho) {
  proxis::AdmmParams p;
  p.rho = rho;
  p.max_iters = 20000;
  p.eps_abs = 1e-13;
  p.eps_rel = 1e-12;
  return p;
}

// ---------------------------------------------------------------------------

Verdict adjoint_identity() {
  using namespace proxis;
  Rng rng = make_rng(1001);
  const auto fd2 = make_finite_difference(9, 7);
  const std::vector<std::pair<std::string, LinearMapPtr>> ops{
      {"identity", make_identity(7)},
      {"dense", make_dense(Matrix::Random(6, 9))},
      {"blur", make_gaussian_blur_1d(128, 0.02, 1.0 / 128)},
      {"fd1d", make_finite_difference(50)},
      {"fd2d", fd2},
      {"parallel-beam", make_parallel_beam(64, 20, 90)},
      {"stack", make_vertical_stack({make_identity(63), fd2})},
      {"scaled", make_scaled(-2.5, fd2)},
  };
  double worst = 0.0;
  std::string worst_name;
  for (const auto& [name, A] : ops) {
    for (int k = 0; k < 100; ++k) {
      const Vector x = standard_normal(rng, A->cols());
      const Vector y = standard_normal(rng, A->rows());
      const double lhs = A->apply(x).dot(y);
      const double rhs = x.dot(A->adjoint_apply(y));
      const double rel = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
      if (rel > worst) {
        worst = rel;
        worst_name = name;
      }
    }
  }
  return {worst <= 1e-10, "8 operator kinds x 100 pairs, worst relative error " + fmt(worst) + " (" + worst_name + ")"};
}

Verdict prox_oracles() {
  using namespace proxis;
  Rng rng = make_rng(1002);
  std::uniform_real_distribution<double> unif(0.05, 2.0);
  Index exact_mismatches = 0;
  double tv_err = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vector v = 2.0 * standard_normal(rng, 20);
    const double t = unif(rng);
    const Vector l1 = prox_l1(v, t), nn = prox_nonnegative(v), box = prox_box(v, -0.5, 0.75);
    for (Index i = 0; i < 20; ++i) {
      const double want_l1 = v[i] > t ? v[i] - t : (v[i] < -t ? v[i] + t : 0.0);
      const double want_nn = v[i] > 0.0 ? v[i] : 0.0;
      const double want_box = v[i] < -0.5 ? -0.5 : (v[i] > 0.75 ? 0.75 : v[i]);
      exact_mismatches += (l1[i] != want_l1) + (nn[i] != want_nn) + (box[i] != want_box);
    }
    const Vector g = prox_group_l2(v, BlockPartition::uniform(20, 5), t);
    for (Index b = 0; b < 4; ++b) {
      double sq = 0.0;
      for (Index i = 0; i < 5; ++i) sq += v[5 * b + i] * v[5 * b + i];
      const double nrm = std::sqrt(sq);
      for (Index i = 0; i < 5; ++i) {
        const double want = nrm > t ? (1.0 - t / nrm) * v[5 * b + i] : 0.0;
        exact_mismatches += g[5 * b + i] != want;
      }
    }
    tv_err = std::max(tv_err, (prox_tv1d(v, t) - oracle::tv1d_admm(v, t, 50000)).cwiseAbs().maxCoeff());
  }
  return {exact_mismatches == 0 && tv_err <= 1e-8,
          std::to_string(exact_mismatches) + " closed-form mismatches, tv1d vs ADMM max error " + fmt(tv_err)};
}

Verdict tikhonov_gaussian() {
  using namespace proxis;
  const Index n = 5, N = 100000;
  const Vector s{{1.0, 2.0, 0.5, 1.5, 0.8}};
  Matrix Sigma(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) Sigma(i, j) = s[i] * s[j] * (i == j ? 1.0 : 0.5);
  const Matrix P = Sigma.inverse();
  const double delta = 0.5 * Eigen::SelfAdjointEigenSolver<Matrix>(P).eigenvalues().minCoeff();
  const double lambda = 2.0;
  const Matrix AtA = (P - delta * Matrix::Identity(n, n)) / lambda;
  const Matrix A = AtA.llt().matrixU();
  const Vector b{{1.0, -1.0, 0.5, 2.0, 0.0}};
  const Vector c{{0.3, 0.0, -0.2, 0.1, 0.5}};
  const Vector mu = Sigma * (lambda * A.transpose() * b + delta * c);

  RandomizedProblem p;
  p.A = make_dense(A);
  p.b = b;
  p.lambda = lambda;
  p.L = make_identity(n);
  p.c = c;
  p.delta = delta;
  p.f = Regularizer::zero();
  const SampleEnsemble e = draw_ensemble(p, tight(1.0), N, 1003);

  const Vector mean = e.samples.colwise().mean().transpose();
  const Matrix centered = e.samples.rowwise() - mean.transpose();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(N - 1);
  double worst_mean = 0.0, worst_cov = 0.0;
  for (Index i = 0; i < n; ++i) {
    worst_mean = std::max(worst_mean, std::abs(mean[i] - mu[i]) / std::sqrt(Sigma(i, i) / N));
    for (Index j = 0; j < n; ++j) worst_cov = std::max(worst_cov, std::abs(cov(i, j) - Sigma(i, j)) / std::abs(Sigma(i, j)));
  }
  return {worst_mean <= 4.0 && worst_cov <= 0.05,
          "mean error " + fmt(worst_mean) + " sigma/sqrt(N) (limit 4), covariance relative error " +
              fmt(worst_cov) + " (limit 0.05)"};
}

proxis::SampleEnsemble scalar_lasso_draws(std::uint64_t seed) {
  using namespace proxis;
  RandomizedProblem p;
  p.A = make_identity(1);
  p.b = Vector::Zero(1);
  p.lambda = 1.0;
  p.f = Regularizer::l1(1.0);
  return draw_ensemble(p, tight(1.0), 100000, seed);
}

Verdict lasso_mass_at_zero() {
  const proxis::SampleEnsemble e = scalar_lasso_draws(1004);
  const double zeros = (e.snapped.col(0).array() == 0.0).cast<double>().mean();
  const double want = oracle::normal_cdf(1.0) - oracle::normal_cdf(-1.0);
  return {std::abs(zeros - want) <= 0.005,
          "P(x = 0) = " + fmt(zeros) + ", expected " + fmt(want) + " +- 0.005"};
}

Verdict face_density_law() {
  const proxis::SampleEnsemble e = scalar_lasso_draws(1005);
  std::vector<double> pos;
  for (Index i = 0; i < e.size(); ++i)
    if (e.snapped(i, 0) > 0.0) pos.push_back(e.snapped(i, 0));
  const oracle::QuadratureCdf cdf([](double x) { return -0.5 * x * x - x; }, 0.0,
                                  std::numeric_limits<double>::infinity(), 0.0);
  const double p = oracle::ks_pvalue_against(pos, cdf);
  return {p > 0.01, std::to_string(pos.size()) + " positive draws, KS p-value " + fmt(p) + " (needs > 0.01)"};
}

Verdict face_dimensions() {
  using namespace proxis;
  Rng rng = make_rng(1006);
  std::uniform_int_distribution<int> len(4, 24), coin(0, 3);
  std::uniform_real_distribution<double> val(0.1, 2.0);
  auto piecewise = [&](Index n, bool nonneg) {
    Vector x(n);
    double cur = 0.0;
    for (Index i = 0; i < n; ++i) {
      const int c = coin(rng);
      if (i == 0 || c == 0) cur = (nonneg || coin(rng) < 2 ? 1.0 : -1.0) * val(rng);
      if (c == 1) cur = 0.0;
      x[i] = cur;
    }
    return x;
  };
  auto active = [](const Matrix& M, const Vector& z, double tol) {
    std::vector<Index> rows;
    for (Index r = 0; r < M.rows(); ++r)
      if (std::abs(z[r]) <= tol) rows.push_back(r);
    Matrix S(static_cast<Index>(rows.size()), M.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) S.row(static_cast<Index>(k)) = M.row(rows[k]);
    return S;
  };
  auto oracle_dim = [](Index n, const Matrix& S) { return n - oracle::dense_rank(S); };

  Index mismatches = 0, total = 0;
  auto record = [&](Index got, Index want) {
    ++total;
    mismatches += got != want;
  };
  for (int k = 0; k < 1000; ++k) {
    const Index n = len(rng);
    const Matrix I = Matrix::Identity(n, n);
    const Matrix D = oracle::difference_matrix(n);

    const Vector xp = piecewise(n, true);
    record(face_dimension(Regularizer::nonnegative(), xp), oracle_dim(n, active(I, xp, 0.0)));

    const Vector xs = piecewise(n, false);
    record(face_dimension(Regularizer::l1(1.0), xs), oracle_dim(n, active(I, xs, 0.0)));
    record(face_dimension(Regularizer::tv1d(n, 1.0), xs), oracle_dim(n, active(D, D * xs, 0.0)));

    Matrix both(2 * n - 1, n);
    both << I, D;
    record(face_dimension(Regularizer::tv1d(n, 1.0, true), xp), oracle_dim(n, active(both, both * xp, 0.0)));

    // l1 of a full-row-rank transform; x is placed on a random face of it.
    const Index m = std::max<Index>(1, n / 2);
    const Matrix T = Matrix::Random(m, n);
    std::vector<Index> zero_rows;
    for (Index r = 0; r < m; ++r)
      if (coin(rng) < 2) zero_rows.push_back(r);
    Matrix Tz(static_cast<Index>(zero_rows.size()), n);
    for (std::size_t i = 0; i < zero_rows.size(); ++i) Tz.row(static_cast<Index>(i)) = T.row(zero_rows[i]);
    Vector x = standard_normal(rng, n);
    if (Tz.rows() > 0) x -= Eigen::CompleteOrthogonalDecomposition<Matrix>(Tz).solve(Tz * x);
    const double tol = 1e-6 * std::max(1.0, x.cwiseAbs().maxCoeff());
    record(face_dimension(Regularizer::sparse_transform(make_dense(T), 1.0), x),
           oracle_dim(n, active(T, T * x, tol)));
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches in " + std::to_string(total) +
                               " vectors (5 families x 1000)"};
}

Verdict delta_conditional() {
  using namespace proxis;
  struct Setting {
    Index dim;
    double lx_sq, f, alpha, beta;
  };
  const std::vector<Setting> settings{
      {10, 4.0, 0.0, 1.0, 1e-4},
      {1, 0.5, 3.0, 1.0, 1e-4},
      {40, 20.0, 15.0, 1.0, 1e-4},
      {128, 2.0, 50.0, 1.0, 1e-4},
      {0, 10.0, 1.0, 2.0, 0.5},
  };
  bool pass = true;
  std::string detail = "KS p-values";
  int idx = 0;
  for (const Setting& s : settings) {
    HyperPriors pr;
    pr.alpha_reg = s.alpha;
    pr.beta_reg = s.beta;
    Rng rng = make_rng(derive_seed(1007, "delta-setting", static_cast<std::uint64_t>(idx++)));
    std::vector<double> d(100000);
    for (double& v : d) v = sample_delta_conditional(s.lx_sq, s.f, s.dim, pr, rng);

    const double a = 0.5 * s.lx_sq + s.beta;
    const double power = 0.5 * static_cast<double>(s.dim) + s.alpha - 1.0;
    auto logp = [=](double x) { return power * std::log(x) - a * x - s.f * std::sqrt(x); };
    // Mode of the density in delta, used only to keep the quadrature in range.
    const double r = (-s.f + std::sqrt(s.f * s.f + 16.0 * a * power)) / (4.0 * a);
    const double anchor = power > 0.0 ? r * r : 1e-6;
    const oracle::QuadratureCdf cdf(logp, 0.0, std::numeric_limits<double>::infinity(), anchor);
    const double p = oracle::ks_pvalue_against(d, cdf);
    pass = pass && p > 0.01;
    detail += " " + fmt(p);

    if (s.f == 0.0) {
      double m = 0.0, v = 0.0;
      for (double x : d) m += x;
      m /= static_cast<double>(d.size());
      for (double x : d) v += (x - m) * (x - m);
      v /= static_cast<double>(d.size() - 1);
      const double shape = 0.5 * static_cast<double>(s.dim) + s.alpha;
      const double em = std::abs(m / (shape / a) - 1.0), ev = std::abs(v / (shape / (a * a)) - 1.0);
      pass = pass && em <= 0.02 && ev <= 0.02;
      detail += " (Gamma mean/var rel err " + fmt(em) + "/" + fmt(ev) + ")";
    }
  }
  return {pass, detail};
}

Verdict sparsity_contrast(const fs::path& workdir) {
  using namespace proxis;
  RunConfig c = default_config(Experiment::compare_baseline);
  const fs::path dir = workdir / "compare-baseline";
  fs::remove_all(dir);
  const RunOutcome o = run_experiment(c, dir, 1);
  if (!o.ok) return {false, "run failed: " + o.error};
  const Matrix implicit = read_samples(dir / "samples_snapped.bin");
  const Matrix rwm = read_samples(dir / "baseline_samples.bin");
  const double fi = flat_pair_fraction(implicit, 0.0);
  const double fr = flat_pair_fraction(rwm, 1e-12);
  return {implicit.rows() == 200 && fi > 0.99 && fr < 1e-3,
          std::to_string(implicit.rows()) + " implicit draws with an exact flat pair: " + fmt(fi) + "; " +
              std::to_string(rwm.rows()) + " RWM draws with a flat pair: " + fmt(fr)};
}

Verdict gibbs_desk_run(const fs::path& workdir) {
  using namespace proxis;
  RunConfig c = default_config(Experiment::gibbs_deblur);
  const fs::path dir = workdir / "gibbs-deblur";
  fs::remove_all(dir);
  const RunOutcome o = run_experiment(c, dir, 1);
  if (!o.ok) return {false, "run failed: " + o.error};
  const CsvTable t = read_csv(dir / "hyper_chain.csv");
  const std::vector<double> lam = t.column("lambda"), dimf = t.column("dimF");
  const std::size_t K = lam.size();
  if (K != 1000) return {false, "chain has " + std::to_string(K) + " states"};
  double lam_mean = 0.0;
  for (std::size_t k = static_cast<std::size_t>(c.gibbs_burn_in); k < K; ++k) lam_mean += lam[k];
  lam_mean /= static_cast<double>(K - static_cast<std::size_t>(c.gibbs_burn_in));
  auto mean_range = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t k = a; k < b; ++k) s += dimf[k];
    return s / static_cast<double>(b - a);
  };
  const double q3 = mean_range(K / 2, 3 * K / 4), q4 = mean_range(3 * K / 4, K);
  const double drift = std::abs(q4 - q3) / q3;
  return {lam_mean >= 300.0 && lam_mean <= 3000.0 && drift <= 0.2,
          "lambda mean " + fmt(lam_mean) + " (band [300, 3000]); dimF quartile means " + fmt(q3) + " -> " +
              fmt(q4) + " (change " + fmt(drift) + ", limit 0.2)"};
}

Verdict ct_desk_scale(const fs::path& workdir) {
  using namespace proxis;
  const RunConfig c = default_config(Experiment::ct);
  const fs::path dir = workdir / "ct";
  fs::remove_all(dir);
  const RunOutcome o = run_experiment(c, dir, 1);
  if (!o.ok) return {false, "run failed: " + o.error};
  const Matrix median = grid_from_csv(dir / "median_image.csv");
  const Matrix truth = grid_from_csv(dir / "truth_image.csv");
  const double rel = (median - truth).norm() / truth.norm();
  const double lo = median.minCoeff();
  const bool shape_ok = median.rows() == 64 && median.cols() == 64;
  return {shape_ok && rel < 0.35 && lo >= -1e-9,
          "64x64 median, relative L2 error " + fmt(rel) + " (limit 0.35), min pixel " + fmt(lo)};
}

Verdict reproducibility(const fs::path& workdir) {
  using namespace proxis;
  RunConfig c = default_config(Experiment::deblur1d);
  c.n = 64;
  c.n_samples = 40;
  c.batch_size = 8;
  c.admm.max_iters = 400;
  c.seed = 2024;
  const fs::path a = workdir / "repro-a", b = workdir / "repro-b", r = workdir / "repro-rerun";
  for (const auto& d : {a, b, r}) fs::remove_all(d);
  if (!run_experiment(c, a, 1).ok) return {false, "first run failed"};
  // Re-execute from the snapshot written by the first run.
  const RunConfig snap = load_config(a / "config.ini");
  if (!run_experiment(snap, b, 3).ok) return {false, "3-worker run failed"};
  if (!run_experiment(snap, r, 1).ok) return {false, "rerun failed"};
  bool same = true;
  for (const char* f : {"samples.bin", "samples_snapped.bin"}) {
    const std::string ref = slurp_bytes(a / f);
    same = same && !ref.empty() && ref == slurp_bytes(b / f) && ref == slurp_bytes(r / f);
  }
  return {same, same ? "samples files byte-identical across 1 and 3 workers and a rerun from config.ini"
                     : "samples files differ"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proxis acceptance suite"};
  std::string workdir = "acceptance_runs";
  std::vector<int> only;
  app.add_option("--workdir", workdir, "Directory for the experiment runs");
  app.add_option("--only", only, "Criterion numbers to run (default: all)");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(workdir);
  const fs::path wd(workdir);

  const std::vector<Criterion> criteria{
      {1, "adjoint identity", 10, adjoint_identity},
      {2, "prox oracles", 60, prox_oracles},
      {3, "Tikhonov Gaussian", 120, tikhonov_gaussian},
      {4, "scalar lasso mass at zero", 60, lasso_mass_at_zero},
      {5, "face density law", 60, face_density_law},
      {6, "face dimensions", 60, face_dimensions},
      {7, "delta conditional", 300, delta_conditional},
      {8, "deblur sparsity contrast", 600, [&] { return sparsity_contrast(wd); }},
      {9, "Gibbs desk run", 1200, [&] { return gibbs_desk_run(wd); }},
      {10, "CT desk scale", 1800, [&] { return ct_desk_scale(wd); }},
      {11, "reproducibility", 0, [&] { return reproducibility(wd); }},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit_s > 0 && secs > c.time_limit_s) {
      v.pass = false;
      v.detail += "; over the " + fmt(c.time_limit_s) + " s limit";
    }
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.title << " (" << fmt(secs)
              << " s): " << v.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
