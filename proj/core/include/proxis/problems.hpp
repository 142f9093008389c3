#pragma once

#include <cstdint>

#include "proxis/linops.hpp"

namespace proxis {

struct InverseProblemInstance {
  LinearMapPtr forward;
  Vector x_true;
  Vector b;
  double lambda_true = 1.0;
  // Grid: 1D signals have ny == 1.
  Index nx = 0;
  Index ny = 1;
  double spacing = 1.0;
  std::uint64_t seed = 0;
};

/// Piecewise test signal on t_i = i / n: a unit step on [0.10, 0.25), a
/// triangular peak of height 1.5 and half-width 0.03 at 0.55, and the arc
/// 24 (t - 0.7)(0.95 - t) on [0.7, 0.95].
Vector deblur_signal(Index n);

/// Gaussian blur data: A = blur(n, sigma, 1/n), b = A x + N(0, I/lambda).
InverseProblemInstance build_deblur1d(Index n = 128, double sigma = 0.02, double lambda = 1000.0,
                                      std::uint64_t seed = 0);

/// Ten-ellipse Shepp-Logan phantom on [-1, 1]^2, n x n pixels, row-major with
/// row 0 at the top. Intensities 1, -0.98, -0.02, -0.02, 0.01 (x6), so values
/// lie in [0, 1].
Vector shepp_logan(Index n);

/// Parallel-beam data for the Shepp-Logan phantom.
InverseProblemInstance build_ct(Index n = 100, Index n_angles = 20, Index n_rays = 120,
                                double lambda = 10.0, std::uint64_t seed = 0);

}  // namespace proxis
