#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "proxis/gibbs.hpp"
#include "proxis/problems.hpp"
#include "proxis/sampler.hpp"

using namespace proxis;

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

GibbsSetup small_deblur_setup(GibbsModel model) {
  const InverseProblemInstance inst = build_deblur1d(32, 0.04, 1000.0, 4);
  GibbsSetup s;
  s.model = model;
  s.A = inst.forward;
  s.b = inst.b;
  s.f = Regularizer::tv1d(32, 1.0, true);
  if (model == GibbsModel::scaled) s.L = make_identity(32);
  s.admm.max_iters = 100;
  s.admm.fixed_iterations = true;
  return s;
}

}  // namespace

TEST_CASE("gamma draws have the right moments") {
  Rng rng = make_rng(1);
  const double shape = 65.0, rate = 0.1281;
  std::vector<double> d(100000);
  for (double& v : d) v = sample_gamma(shape, rate, rng);
  const double m = mean_of(d);
  CHECK(shape / rate == doctest::Approx(507.4).epsilon(1e-3));
  CHECK(std::abs(m - shape / rate) <= 4.0 * std::sqrt(shape) / rate / std::sqrt(1e5));
  double var = 0.0;
  for (double v : d) var += (v - m) * (v - m);
  var /= static_cast<double>(d.size() - 1);
  CHECK(var == doctest::Approx(shape / (rate * rate)).epsilon(0.03));
}

TEST_CASE("lambda conditional") {
  HyperPriors pr;
  pr.alpha_lambda = 2.0;
  pr.beta_lambda = 0.5;
  Rng rng = make_rng(2);
  std::vector<double> d(50000);
  for (double& v : d) v = sample_lambda_conditional(3.0, 10, pr, rng);
  const double shape = 5.0 + 2.0, rate = 1.5 + 0.5;
  CHECK(std::abs(mean_of(d) - shape / rate) <= 4.0 * std::sqrt(shape) / rate / std::sqrt(5e4));
}

TEST_CASE("gamma conditional of the alternative model") {
  HyperPriors pr;
  Rng rng = make_rng(3);
  std::vector<double> d(50000);
  for (double& v : d) v = sample_gamma_conditional_alt(ExtendedReal{4.0, true}, 6, pr, rng);
  const double shape = 6.0 + pr.alpha_reg, rate = 4.0 + pr.beta_reg;
  CHECK(std::abs(mean_of(d) - shape / rate) <= 4.0 * std::sqrt(shape) / rate / std::sqrt(5e4));
  CHECK_THROWS_AS(sample_gamma_conditional_alt(ExtendedReal::infinity(), 6, pr, rng), std::domain_error);
}

TEST_CASE("hyperprior validation") {
  HyperPriors pr;
  CHECK_NOTHROW(pr.validate());
  pr.beta_lambda = 0.0;
  CHECK_THROWS(pr.validate());
  pr = HyperPriors{};
  pr.alpha_reg = -1.0;
  CHECK_THROWS(pr.validate());
}

TEST_CASE("delta target mode maximizes the log density") {
  const DeltaTarget t(7, 3.0, 2.5, 1.0, 1e-4);
  CHECK(t.power == doctest::Approx(7.0 + 2.0 - 1.0));
  CHECK(t.quadratic == doctest::Approx(1.5 + 1e-4));
  CHECK(t.linear == doctest::Approx(2.5));
  const double m = t.mode();
  CHECK(m > 0.0);
  for (double h : {1e-3, 1e-2, 1e-1}) {
    CHECK(t.log_density(m) >= t.log_density(m + h));
    CHECK(t.log_density(m) >= t.log_density(m - h));
  }
}

TEST_CASE("delta conditional matches its density") {
  const Index dim = 12;
  const double lx_sq = 8.0, fval = 5.0;
  HyperPriors pr;
  Rng rng = make_rng(4);
  std::vector<double> d(20000);
  for (double& v : d) v = sample_delta_conditional(lx_sq, fval, dim, pr, rng);
  const double a = 0.5 * lx_sq + pr.beta_reg;
  const double p = 0.5 * static_cast<double>(dim) + pr.alpha_reg - 1.0;
  auto logp = [&](double x) { return p * std::log(x) - a * x - fval * std::sqrt(x); };
  const oracle::QuadratureCdf cdf(logp, 0.0, std::numeric_limits<double>::infinity(), p / a);
  CHECK(oracle::ks_pvalue_against(d, cdf) > 0.01);
  CHECK(mean_of(d) == doctest::Approx(cdf.mean()).epsilon(0.02));
}

TEST_CASE("delta conditional without a regularizer value is Gamma") {
  const Index dim = 20;
  const double lx_sq = 4.0;
  HyperPriors pr;
  Rng rng = make_rng(5);
  std::vector<double> d(20000);
  for (double& v : d) v = sample_delta_conditional(lx_sq, 0.0, dim, pr, rng);
  const double shape = 0.5 * dim + pr.alpha_reg, rate = 0.5 * lx_sq + pr.beta_reg;
  CHECK(mean_of(d) == doctest::Approx(shape / rate).epsilon(0.02));
}

TEST_CASE("slice sampler targets a Gamma(3, 1)") {
  Rng rng = make_rng(6);
  auto logp = [](double x) { return 2.0 * std::log(x) - x; };
  double x = 1.0;
  std::vector<double> chain;
  for (int i = 0; i < 40000; ++i) {
    x = slice_update(logp, x, 1.0, rng);
    chain.push_back(x);
  }
  CHECK(mean_of(chain) == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("setup validation") {
  GibbsSetup s = small_deblur_setup(GibbsModel::scaled);
  s.L = nullptr;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  GibbsSetup t = small_deblur_setup(GibbsModel::alternative);
  t.f = Regularizer::tikhonov(make_identity(32), Vector::Ones(32), 1.0);
  CHECK_THROWS(t.validate());
}

TEST_CASE("chains are reproducible and replayable") {
  const GibbsSetup s = small_deblur_setup(GibbsModel::alternative);
  int observed = 0;
  const GibbsChain a = run_gibbs(s, Vector{}, 12, 77, [&](int k, const GibbsState&) { observed = k; });
  const GibbsChain b = run_gibbs(s, Vector{}, 12, 77);
  CHECK(observed == 12);
  REQUIRE(a.states.size() == 12);
  for (std::size_t k = 0; k < 12; ++k) {
    CHECK(a.states[k].x == b.states[k].x);
    CHECK(a.states[k].lambda == b.states[k].lambda);
  }
  const GibbsState replay = gibbs_step(s, a.states[6], 77, 8);
  CHECK(replay.x == a.states[7].x);
  CHECK(replay.reg == a.states[7].reg);
  for (const GibbsState& st : a.states) {
    CHECK(st.x.minCoeff() >= 0.0);
    CHECK(st.dim_face == face_dimension(s.f, st.x));
    CHECK(st.residual_sq == doctest::Approx((s.A->apply(st.x) - s.b).squaredNorm()));
  }
}

TEST_CASE("scaled model chain runs") {
  const GibbsChain c = run_pcehgs(small_deblur_setup(GibbsModel::scaled), Vector{}, 10, 5);
  CHECK(c.model == GibbsModel::scaled);
  for (const GibbsState& st : c.states) {
    CHECK(st.lambda > 0.0);
    CHECK(st.reg > 0.0);
  }
}

TEST_CASE("lambda estimates are insensitive to vague hyperpriors") {
  std::vector<double> means;
  for (double beta : {1e-4, 1e-3, 1e-2}) {
    GibbsSetup s = small_deblur_setup(GibbsModel::alternative);
    s.priors.beta_lambda = beta;
    s.priors.beta_reg = beta;
    const GibbsChain c = run_alt_gibbs(s, Vector{}, 150, 11);
    std::vector<double> lam;
    for (std::size_t k = 50; k < c.states.size(); ++k) lam.push_back(c.states[k].lambda);
    means.push_back(mean_of(lam));
  }
  const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
  CHECK(*hi / *lo < 10.0);
}

TEST_CASE("exponential and large-sample gamma moments") {
  Rng rng = make_rng(21);
  std::vector<double> e(1000000);
  for (double& v : e) v = sample_gamma(1.0, 2.0, rng);
  CHECK(std::abs(mean_of(e) - 0.5) < 0.002);
  std::vector<double> g(1000000);
  for (double& v : g) v = sample_gamma(65.0, 0.1281, rng);
  const double m = mean_of(g);
  double var = 0.0;
  for (double v : g) var += (v - m) * (v - m);
  var /= static_cast<double>(g.size() - 1);
  CHECK(var == doctest::Approx(65.0 / (0.1281 * 0.1281)).epsilon(0.02));
}

TEST_CASE("conditional rates from the prior alone") {
  HyperPriors pr;
  pr.alpha_lambda = 1.0;
  pr.beta_lambda = 1.0;
  Rng rng = make_rng(22);
  std::vector<double> d(200000);
  for (double& v : d) v = sample_lambda_conditional(0.0, 2, pr, rng);
  // Gamma(2, 1).
  CHECK(std::abs(mean_of(d) - 2.0) < 4.0 * std::sqrt(2.0) / std::sqrt(2e5));

  HyperPriors vague;
  for (double& v : d) v = sample_gamma_conditional_alt(ExtendedReal{0.0, true}, 0, vague, rng);
  CHECK(mean_of(d) == doctest::Approx(1e4).epsilon(0.01));
  for (double& v : d) v = sample_gamma_conditional_alt(ExtendedReal{3.2, true}, 64, vague, rng);
  CHECK(65.0 / 3.2001 == doctest::Approx(20.31).epsilon(1e-3));
  CHECK(mean_of(d) == doctest::Approx(65.0 / 3.2001).epsilon(0.005));
}

TEST_CASE("scaled prior is invariant under rescaling by sqrt(delta)") {
  // argmin 1/2 (sqrt(d) x - c)^2 + sqrt(d) f(x) equals y / sqrt(d) with
  // y = argmin 1/2 (y - c)^2 + f(y) for positively homogeneous f.
  const double delta = 6.25, s = std::sqrt(delta);
  const Regularizer f = Regularizer::l1(1.0).add(Regularizer::nonnegative().terms()[0]);
  RandomizedProblem unit, scaled;
  unit.A = make_identity(1);
  unit.b = Vector::Zero(1);
  unit.f = f;
  scaled.A = make_scaled(s, make_identity(1));
  scaled.b = Vector::Zero(1);
  scaled.f = f.scaled(s);
  AdmmParams p;
  p.eps_abs = 1e-13;
  p.eps_rel = 1e-13;
  p.max_iters = 20000;
  const SampleEnsemble a = draw_ensemble(unit, p, 200, 5);
  const SampleEnsemble b = draw_ensemble(scaled, p, 200, 5);
  for (Index i = 0; i < a.samples.rows(); ++i) {
    CHECK(std::abs(s * b.samples(i, 0) - a.samples(i, 0)) < 1e-8);
  }
}
