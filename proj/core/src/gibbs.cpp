#include "proxis/gibbs.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "proxis/error.hpp"
#include "proxis/sampler.hpp"

namespace proxis {

void HyperPriors::validate() const {
  if (!(alpha_lambda > 0.0) || !(beta_lambda > 0.0) || !(alpha_reg > 0.0) || !(beta_reg > 0.0)) {
    throw std::invalid_argument("HyperPriors: all shape and rate parameters must be > 0");
  }
}

double sample_gamma(double shape, double rate, Rng& rng) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::invalid_argument("sample_gamma: shape and rate must be > 0");
  }
  std::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(rng);
}

double sample_lambda_conditional(double residual_sq, Index m, const HyperPriors& priors, Rng& rng) {
  if (!std::isfinite(residual_sq) || residual_sq < 0.0) {
    throw std::domain_error("sample_lambda_conditional: residual must be finite and >= 0");
  }
  return sample_gamma(0.5 * static_cast<double>(m) + priors.alpha_lambda,
                      0.5 * residual_sq + priors.beta_lambda, rng);
}

// ------------------------------------------------------------ delta | x

DeltaTarget::DeltaTarget(Index dim_face, double lx_sq, double f_value, double alpha, double beta)
    : power(static_cast<double>(dim_face) + 2.0 * alpha - 1.0),
      quadratic(0.5 * lx_sq + beta),
      linear(f_value) {
  if (!std::isfinite(f_value) || f_value < 0.0 || !std::isfinite(lx_sq) || !(quadratic > 0.0) ||
      !(power > -1.0)) {
    throw std::domain_error("DeltaTarget: conditional density is not normalizable");
  }
}

double DeltaTarget::log_density(double u) const noexcept {
  if (!(u > 0.0)) return -std::numeric_limits<double>::infinity();
  return power * std::log(u) - quadratic * u * u - linear * u;
}

double DeltaTarget::mode() const noexcept {
  if (power <= 0.0) return 0.0;
  return (-linear + std::sqrt(linear * linear + 8.0 * quadratic * power)) / (4.0 * quadratic);
}

double sample_delta_conditional(const DeltaTarget& target, Rng& rng, int transitions) {
  const double mode = target.mode();
  // Width from the curvature of the log density at the mode.
  const double curvature =
      2.0 * target.quadratic + (mode > 0.0 ? target.power / (mode * mode) : 0.0);
  const double scale = 1.0 / std::sqrt(curvature);
  double u = mode > 0.0 ? mode : scale;
  auto logp = [&](double v) { return target.log_density(v); };
  for (int t = 0; t < transitions; ++t) u = slice_update(logp, u, 2.5 * scale, rng);
  if (!std::isfinite(u) || !(u > 0.0)) throw DivergenceError("sample_delta_conditional: bad draw");
  return u * u;
}

double sample_delta_conditional(double lx_sq, double f_value, Index dim_face,
                                const HyperPriors& priors, Rng& rng, int transitions) {
  return sample_delta_conditional(
      DeltaTarget(dim_face, lx_sq, f_value, priors.alpha_reg, priors.beta_reg), rng, transitions);
}

double sample_gamma_conditional_alt(const ExtendedReal& f_value, Index dim_face,
                                    const HyperPriors& priors, Rng& rng) {
  if (!f_value.finite) throw std::domain_error("sample_gamma_conditional_alt: f(x) is infinite");
  return sample_gamma(static_cast<double>(dim_face) + priors.alpha_reg,
                      f_value.value + priors.beta_reg, rng);
}

// ---------------------------------------------------------------- chains

void GibbsSetup::validate() const {
  if (!A) throw std::invalid_argument("GibbsSetup: forward map is required");
  if (b.size() != A->rows()) throw DimensionError("GibbsSetup: b has wrong length");
  priors.validate();
  admm.validate();
  f.validate(A->cols());
  if (!f.positive_homogeneous()) {
    throw UnsupportedRegularizerError("Gibbs sampling requires a positively homogeneous f");
  }
  if (!f.polyhedral()) {
    throw UnsupportedRegularizerError("Gibbs sampling requires a polyhedral f");
  }
  if (model == GibbsModel::scaled) {
    if (!L) throw std::invalid_argument("GibbsSetup: the scaled model needs L");
    if (L->cols() != A->cols()) throw DimensionError("GibbsSetup: L has wrong column count");
  }
}

namespace {

RandomizedProblem conditional_problem(const GibbsSetup& s, double lambda, double reg) {
  RandomizedProblem p;
  p.A = s.A;
  p.b = s.b;
  p.lambda = lambda;
  p.perturb_prior = true;
  if (s.model == GibbsModel::scaled) {
    p.L = s.L;
    p.delta = reg;
    p.f = s.f.scaled(std::sqrt(reg));
  } else {
    p.f = s.f.scaled(reg);
  }
  return p;
}

GibbsState make_state(const GibbsSetup& s, Vector x, double lambda, double reg) {
  GibbsState st;
  st.dim_face = face_dimension(s.f, x, s.snap_tol);
  st.residual_sq = (s.A->apply(x) - s.b).squaredNorm();
  st.x = std::move(x);
  st.lambda = lambda;
  st.reg = reg;
  return st;
}

}  // namespace

Vector gibbs_initial_point(const GibbsSetup& setup) {
  setup.validate();
  const double lambda = setup.priors.lambda_mean();
  const double reg = setup.priors.reg_mean();
  const RandomizedProblem p = conditional_problem(setup, lambda, reg);
  const AdmmSolver solver(p.model(), setup.admm);
  const AdmmResult res = solver.solve(p.b);
  return snap_to_face(setup.f, res.x, setup.snap_tol);
}

GibbsState gibbs_step(const GibbsSetup& setup, const GibbsState& prev, std::uint64_t seed,
                      std::uint64_t k, int* admm_iters) {
  Rng rng = make_rng(derive_seed(seed, seed_labels::gibbs_hyper, k));
  const double lambda = sample_lambda_conditional(prev.residual_sq, setup.A->rows(), setup.priors, rng);

  const ExtendedReal fx = setup.f.eval(prev.x);
  double reg = 0.0;
  if (setup.model == GibbsModel::scaled) {
    if (!fx.finite) throw std::domain_error("gibbs_step: f(x) is infinite");
    const double lx_sq = setup.L->apply(prev.x).squaredNorm();
    reg = sample_delta_conditional(lx_sq, fx.value, prev.dim_face, setup.priors, rng,
                                   setup.slice_transitions);
  } else {
    reg = sample_gamma_conditional_alt(fx, prev.dim_face, setup.priors, rng);
  }

  SamplerOptions opts;
  opts.snap_tol = setup.snap_tol;
  const ImplicitSampler sampler(conditional_problem(setup, lambda, reg), setup.admm, opts);
  Sample s = sampler.draw(split_seed(seed, k));
  if (admm_iters) *admm_iters = s.diagnostics.iters;
  return make_state(setup, std::move(s.snapped), lambda, reg);
}

GibbsChain run_gibbs(const GibbsSetup& setup, const Vector& x0, int k_max, std::uint64_t seed,
                     const GibbsObserver& observer) {
  setup.validate();
  if (k_max < 0) throw std::invalid_argument("run_gibbs: k_max must be >= 0");
  GibbsChain chain;
  chain.model = setup.model;
  chain.priors = setup.priors;
  chain.seed = seed;
  chain.snap_tol = setup.snap_tol;
  Vector start = x0.size() != 0 ? x0 : gibbs_initial_point(setup);
  if (start.size() != setup.A->cols()) throw DimensionError("run_gibbs: x0 has wrong length");
  chain.initial = make_state(setup, std::move(start), setup.priors.lambda_mean(), setup.priors.reg_mean());
  chain.states.reserve(static_cast<std::size_t>(k_max));
  chain.admm_iters.reserve(static_cast<std::size_t>(k_max));
  const GibbsState* prev = &chain.initial;
  for (int k = 1; k <= k_max; ++k) {
    int iters = 0;
    try {
      chain.states.push_back(gibbs_step(setup, *prev, seed, static_cast<std::uint64_t>(k), &iters));
    } catch (const std::exception& e) {
      throw Error("Gibbs iteration " + std::to_string(k) + " failed: " + e.what());
    }
    chain.admm_iters.push_back(iters);
    prev = &chain.states.back();
    if (observer) observer(k, *prev);
  }
  return chain;
}

GibbsChain run_pcehgs(GibbsSetup setup, const Vector& x0, int k_max, std::uint64_t seed,
                      const GibbsObserver& observer) {
  setup.model = GibbsModel::scaled;
  return run_gibbs(setup, x0, k_max, seed, observer);
}

GibbsChain run_alt_gibbs(GibbsSetup setup, const Vector& x0, int k_max, std::uint64_t seed,
                         const GibbsObserver& observer) {
  setup.model = GibbsModel::alternative;
  RandomizedProblem check;
  check.A = setup.A;
  check.b = setup.b;
  check.check_identifiable();
  return run_gibbs(setup, x0, k_max, seed, observer);
}

}  // namespace proxis
