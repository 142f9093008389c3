#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "proxis/admm.hpp"
#include "proxis/faces.hpp"
#include "proxis/rng.hpp"

namespace proxis {

/// Gamma(shape, rate) hyperpriors. `alpha_reg`/`beta_reg` belong to delta in
/// the scaled model and to gamma in the alternative model.
struct HyperPriors {
  double alpha_lambda = 1.0;
  double beta_lambda = 1e-4;
  double alpha_reg = 1.0;
  double beta_reg = 1e-4;

  void validate() const;
  double lambda_mean() const noexcept { return alpha_lambda / beta_lambda; }
  double reg_mean() const noexcept { return alpha_reg / beta_reg; }
};

/// Gamma(shape, rate) draw; mean shape / rate.
double sample_gamma(double shape, double rate, Rng& rng);

/// lambda | x ~ Gamma(m/2 + alpha, ||Ax - b||^2 / 2 + beta).
double sample_lambda_conditional(double residual_sq, Index m, const HyperPriors& priors, Rng& rng);

/// Log density (up to a constant) of u = sqrt(delta) given x:
/// (dimF + 2 alpha - 1) log u - (||Lx||^2 / 2 + beta) u^2 - f(x) u.
struct DeltaTarget {
  double power = 0.0;      // dimF + 2 alpha - 1
  double quadratic = 0.0;  // ||Lx||^2 / 2 + beta
  double linear = 0.0;     // f(x)

  DeltaTarget(Index dim_face, double lx_sq, double f_value, double alpha, double beta);
  double log_density(double u) const noexcept;
  double mode() const noexcept;
};

/// delta | x drawn by slice sampling on u = sqrt(delta): `transitions`
/// doubling-slice updates started at the mode of u.
double sample_delta_conditional(const DeltaTarget& target, Rng& rng, int transitions = 20);
double sample_delta_conditional(double lx_sq, double f_value, Index dim_face,
                                const HyperPriors& priors, Rng& rng, int transitions = 20);

/// gamma | x ~ Gamma(dimF + alpha, f(x) + beta). Throws std::domain_error if
/// f(x) is infinite.
double sample_gamma_conditional_alt(const ExtendedReal& f_value, Index dim_face,
                                    const HyperPriors& priors, Rng& rng);

/// One univariate slice-sampling update (Neal 2003, doubling procedure with
/// the acceptability check) of a density on (0, inf).
template <class LogDensity>
double slice_update(const LogDensity& logp, double x0, double width, Rng& rng, int max_doublings = 50);

enum class GibbsModel {
  scaled,       // lambda/2 ||Ax - b^||^2 + delta/2 ||Lx - c^||^2 + sqrt(delta) f(x)
  alternative,  // lambda/2 ||Ax - b^||^2 + gamma f(x)
};

struct GibbsState {
  Vector x;  // snapped sample
  double lambda = 0.0;
  double reg = 0.0;  // delta or gamma
  Index dim_face = 0;
  double residual_sq = 0.0;  // ||Ax - b||^2
};

struct GibbsChain {
  GibbsModel model = GibbsModel::alternative;
  HyperPriors priors;
  std::uint64_t seed = 0;
  double snap_tol = kDefaultSnapTolerance;
  GibbsState initial;
  std::vector<GibbsState> states;  // iterations 1..k_max
  std::vector<int> admm_iters;
};

struct GibbsSetup {
  GibbsModel model = GibbsModel::alternative;
  LinearMapPtr A;
  Vector b;
  LinearMapPtr L;  // scaled model only
  Regularizer f;
  HyperPriors priors;
  AdmmParams admm;
  double snap_tol = kDefaultSnapTolerance;
  int slice_transitions = 20;

  /// Checks shapes, the positive homogeneity of f and, for the scaled model,
  /// the presence of L. Throws std::invalid_argument or
  /// UnsupportedRegularizerError.
  void validate() const;
};

/// Solves the unperturbed problem at the prior means of the hyperparameters.
Vector gibbs_initial_point(const GibbsSetup& setup);

/// One Gibbs iteration from `prev`; iteration index k >= 1 selects the random
/// streams, so replaying from any stored state reproduces the chain.
GibbsState gibbs_step(const GibbsSetup& setup, const GibbsState& prev, std::uint64_t seed,
                      std::uint64_t k, int* admm_iters = nullptr);

/// Called after each completed iteration k.
using GibbsObserver = std::function<void(int k, const GibbsState& state)>;

/// Runs k_max iterations. An empty x0 selects gibbs_initial_point().
GibbsChain run_gibbs(const GibbsSetup& setup, const Vector& x0, int k_max, std::uint64_t seed,
                     const GibbsObserver& observer = {});

/// Scaled-model sampler (delta conditional by slice sampling).
GibbsChain run_pcehgs(GibbsSetup setup, const Vector& x0, int k_max, std::uint64_t seed,
                      const GibbsObserver& observer = {});
/// Alternative-model sampler (gamma conditional is Gamma).
GibbsChain run_alt_gibbs(GibbsSetup setup, const Vector& x0, int k_max, std::uint64_t seed,
                         const GibbsObserver& observer = {});

// ------------------------------------------------------------------------

template <class LogDensity>
double slice_update(const LogDensity& logp, double x0, double width, Rng& rng, int max_doublings) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto lp = [&](double x) { return x > 0.0 ? logp(x) : -std::numeric_limits<double>::infinity(); };
  const double level = lp(x0) + std::log(unif(rng));

  double left = x0 - width * unif(rng);
  double right = left + width;
  for (int k = 0; k < max_doublings && (level < lp(left) || level < lp(right)); ++k) {
    if (unif(rng) < 0.5) {
      left -= right - left;
    } else {
      right += right - left;
    }
  }

  // Neal's acceptability test for the doubling procedure.
  auto acceptable = [&](double x1) {
    double l = left, r = right;
    bool differ = false;
    while (r - l > 1.1 * width) {
      const double mid = 0.5 * (l + r);
      if ((x0 < mid && x1 >= mid) || (x0 >= mid && x1 < mid)) differ = true;
      if (x1 < mid) {
        r = mid;
      } else {
        l = mid;
      }
      if (differ && level >= lp(l) && level >= lp(r)) return false;
    }
    return true;
  };

  double l = left, r = right;
  for (;;) {
    const double x1 = l + unif(rng) * (r - l);
    if (level < lp(x1) && acceptable(x1)) return x1;
    if (x1 < x0) {
      l = x1;
    } else {
      r = x1;
    }
  }
}

}  // namespace proxis
