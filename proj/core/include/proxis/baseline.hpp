#pragma once

#include <cstdint>
#include <functional>

#include "proxis/linops.hpp"

namespace proxis {

/// log pi(x | b) = -lambda/2 ||Ax - b||^2 - gamma ||Lx||_1 (+ const).
double log_density_laplace_difference(const Vector& x, const LinearMap& A, const Vector& b,
                                      double lambda, double gamma, const LinearMap& L);

struct LaplaceDifferencePosterior {
  LinearMapPtr A;
  Vector b;
  double lambda = 1.0;
  double gamma = 1.0;
  LinearMapPtr L;

  double operator()(const Vector& x) const {
    return log_density_laplace_difference(x, *A, b, lambda, gamma, *L);
  }
};

using LogDensity = std::function<double(const Vector&)>;

struct RwmOptions {
  double step = 0.01;
  /// Steps after burn-in; the chain keeps n_steps / thin of them.
  Index n_steps = 200000;
  /// Steps discarded before recording. When `tune` is set the proposal scale
  /// is adapted toward `target_acceptance` during burn-in and then frozen.
  Index burn_in = 0;
  bool tune = false;
  double target_acceptance = 0.25;
  /// Keep every thin-th post-burn-in state.
  Index thin = 1;
};

struct RwmResult {
  Matrix chain;                  // recorded states, one per row
  double acceptance_rate = 0.0;  // over the post-burn-in steps
  double step = 0.0;             // proposal scale actually used after burn-in
  Index n_steps = 0;
};

/// Random-walk Metropolis with proposal x + step * N(0, I).
RwmResult rwm_chain(const LogDensity& log_density, const Vector& x0, const RwmOptions& options,
                    std::uint64_t seed);

/// Plain form: no burn-in, no thinning, no tuning; returns every state.
RwmResult rwm_chain(const LogDensity& log_density, const Vector& x0, double step, Index n_steps,
                    std::uint64_t seed);

}  // namespace proxis
