#include "proxis/baseline.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "proxis/error.hpp"
#include "proxis/rng.hpp"

namespace proxis {

double log_density_laplace_difference(const Vector& x, const LinearMap& A, const Vector& b,
                                      double lambda, double gamma, const LinearMap& L) {
  if (b.size() != A.rows()) throw DimensionError("log_density_laplace_difference: b has wrong length");
  return -0.5 * lambda * (A.apply(x) - b).squaredNorm() - gamma * L.apply(x).lpNorm<1>();
}

RwmResult rwm_chain(const LogDensity& log_density, const Vector& x0, const RwmOptions& opt,
                    std::uint64_t seed) {
  if (!(opt.step > 0.0)) throw std::invalid_argument("rwm_chain: step must be > 0");
  if (opt.n_steps < 0 || opt.burn_in < 0 || opt.thin < 1) {
    throw std::invalid_argument("rwm_chain: bad chain length, burn-in or thinning");
  }
  Rng rng = make_rng(derive_seed(seed, seed_labels::rwm_chain));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const Index n = x0.size();
  Vector x = x0;
  double lp = log_density(x);
  if (!std::isfinite(lp)) throw std::domain_error("rwm_chain: log density is not finite at x0");
  double step = opt.step;

  RwmResult out;
  const Index recorded = opt.n_steps / opt.thin;
  out.chain.resize(recorded, n);
  Index kept = 0;
  Index accepted = 0;
  Index window_accepted = 0;
  constexpr Index kWindow = 100;

  Vector proposal(n);
  const Index total = opt.burn_in + opt.n_steps;
  for (Index t = 0; t < total; ++t) {
    for (Index i = 0; i < n; ++i) proposal[i] = x[i] + step * normal(rng);
    const double lp_new = log_density(proposal);
    const double log_u = std::log(unif(rng));
    const bool accept = std::isfinite(lp_new) && log_u < lp_new - lp;
    if (accept) {
      x.swap(proposal);
      lp = lp_new;
    }
    if (t < opt.burn_in) {
      window_accepted += accept ? 1 : 0;
      if (opt.tune && (t + 1) % kWindow == 0) {
        const double rate = static_cast<double>(window_accepted) / kWindow;
        step *= std::exp(2.0 * (rate - opt.target_acceptance));
        window_accepted = 0;
      }
      continue;
    }
    const Index s = t - opt.burn_in;
    accepted += accept ? 1 : 0;
    if ((s + 1) % opt.thin == 0 && kept < recorded) out.chain.row(kept++) = x.transpose();
  }
  out.acceptance_rate = opt.n_steps > 0 ? static_cast<double>(accepted) / static_cast<double>(opt.n_steps) : 0.0;
  out.step = step;
  out.n_steps = opt.n_steps;
  return out;
}

RwmResult rwm_chain(const LogDensity& log_density, const Vector& x0, double step, Index n_steps,
                    std::uint64_t seed) {
  RwmOptions opt;
  opt.step = step;
  opt.n_steps = n_steps;
  return rwm_chain(log_density, x0, opt, seed);
}

}  // namespace proxis
