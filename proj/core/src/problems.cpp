#include "proxis/problems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "proxis/rng.hpp"

namespace proxis {

Vector deblur_signal(Index n) {
  Vector x = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n);
    if (t >= 0.10 && t < 0.25) {
      x[i] = 1.0;
    } else if (t >= 0.52 && t <= 0.58) {
      x[i] = 1.5 * std::max(0.0, 1.0 - std::abs(t - 0.55) / 0.03);
    } else if (t >= 0.7 && t <= 0.95) {
      x[i] = std::max(0.0, 24.0 * (t - 0.7) * (0.95 - t));
    }
  }
  return x;
}

namespace {

void add_noise(InverseProblemInstance& inst) {
  Rng rng = make_rng(derive_seed(inst.seed, seed_labels::noise_sim));
  inst.b = inst.forward->apply(inst.x_true) +
           standard_normal(rng, inst.forward->rows()) / std::sqrt(inst.lambda_true);
}

}  // namespace

InverseProblemInstance build_deblur1d(Index n, double sigma, double lambda, std::uint64_t seed) {
  if (n < 8) throw std::invalid_argument("build_deblur1d: n must be >= 8");
  if (!(lambda > 0.0)) throw std::invalid_argument("build_deblur1d: lambda must be > 0");
  InverseProblemInstance inst;
  inst.spacing = 1.0 / static_cast<double>(n);
  inst.forward = make_gaussian_blur_1d(n, sigma, inst.spacing);
  inst.x_true = deblur_signal(n);
  inst.lambda_true = lambda;
  inst.nx = n;
  inst.ny = 1;
  inst.seed = seed;
  add_noise(inst);
  return inst;
}

Vector shepp_logan(Index n) {
  if (n < 16) throw std::invalid_argument("shepp_logan: n must be >= 16");
  struct Ellipse {
    double value, a, b, x0, y0, phi_deg;
  };
  static constexpr std::array<Ellipse, 10> kEllipses{{
      {1.00, 0.69, 0.92, 0.0, 0.0, 0.0},
      {-0.98, 0.6624, 0.874, 0.0, -0.0184, 0.0},
      {-0.02, 0.11, 0.31, 0.22, 0.0, -18.0},
      {-0.02, 0.16, 0.41, -0.22, 0.0, 18.0},
      {0.01, 0.21, 0.25, 0.0, 0.35, 0.0},
      {0.01, 0.046, 0.046, 0.0, 0.1, 0.0},
      {0.01, 0.046, 0.046, 0.0, -0.1, 0.0},
      {0.01, 0.046, 0.023, -0.08, -0.605, 0.0},
      {0.01, 0.023, 0.023, 0.0, -0.606, 0.0},
      {0.01, 0.023, 0.046, 0.06, -0.605, 0.0},
  }};
  Vector img = Vector::Zero(n * n);
  const double dn = static_cast<double>(n);
  for (Index j = 0; j < n; ++j) {
    const double y = 1.0 - (2.0 * static_cast<double>(j) + 1.0) / dn;
    for (Index i = 0; i < n; ++i) {
      const double x = -1.0 + (2.0 * static_cast<double>(i) + 1.0) / dn;
      double v = 0.0;
      for (const Ellipse& e : kEllipses) {
        const double phi = e.phi_deg * std::numbers::pi / 180.0;
        const double dx = x - e.x0, dy = y - e.y0;
        const double xr = dx * std::cos(phi) + dy * std::sin(phi);
        const double yr = -dx * std::sin(phi) + dy * std::cos(phi);
        if ((xr * xr) / (e.a * e.a) + (yr * yr) / (e.b * e.b) <= 1.0) v += e.value;
      }
      img[j * n + i] = std::clamp(v, 0.0, 1.0);
    }
  }
  return img;
}

InverseProblemInstance build_ct(Index n, Index n_angles, Index n_rays, double lambda,
                                std::uint64_t seed) {
  if (!(lambda > 0.0)) throw std::invalid_argument("build_ct: lambda must be > 0");
  InverseProblemInstance inst;
  inst.forward = make_parallel_beam(n, n_angles, n_rays);
  inst.x_true = shepp_logan(n);
  inst.lambda_true = lambda;
  inst.nx = n;
  inst.ny = n;
  inst.seed = seed;
  add_noise(inst);
  return inst;
}

}  // namespace proxis
