// Exact ray/pixel intersection lengths for the parallel-beam projector.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "proxis/linops.hpp"

namespace proxis {

namespace {

// Appends (pixel, length) pairs for the line p(t) = origin + t * dir, with
// |dir| = 1, through the n x n unit-pixel image covering [-n/2, n/2]^2.
// Row j of the image sits at y in [n/2 - j - 1, n/2 - j] (row 0 on top).
void trace_ray(Index n, double ox, double oy, double dx, double dy,
               std::vector<double>& ts, std::vector<Eigen::Triplet<double>>& out,
               Index row) {
  constexpr double kParallel = 1e-12;
  const double half = 0.5 * static_cast<double>(n);

  // Clip to the image box (slab method).
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  auto clip = [&](double o, double d) {
    if (std::abs(d) < kParallel) return o >= -half && o <= half;
    double a = (-half - o) / d;
    double b = (half - o) / d;
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    return true;
  };
  if (!clip(ox, dx) || !clip(oy, dy) || !(t1 > t0)) return;

  ts.clear();
  ts.push_back(t0);
  ts.push_back(t1);
  auto crossings = [&](double o, double d) {
    if (std::abs(d) < kParallel) return;
    for (Index k = 0; k <= n; ++k) {
      const double t = (-half + static_cast<double>(k) - o) / d;
      if (t > t0 && t < t1) ts.push_back(t);
    }
  };
  crossings(ox, dx);
  crossings(oy, dy);
  std::sort(ts.begin(), ts.end());

  for (std::size_t s = 0; s + 1 < ts.size(); ++s) {
    const double len = ts[s + 1] - ts[s];
    if (len <= 1e-13) continue;
    const double tm = 0.5 * (ts[s] + ts[s + 1]);
    const double px = ox + tm * dx;
    const double py = oy + tm * dy;
    const auto col = std::clamp<Index>(static_cast<Index>(std::floor(px + half)), 0, n - 1);
    const auto rw = std::clamp<Index>(static_cast<Index>(std::floor(half - py)), 0, n - 1);
    out.emplace_back(row, rw * n + col, len);
  }
}

}  // namespace

ParallelBeam::ParallelBeam(Index n, Index n_angles, Index n_rays)
    : LinearMap(n_angles * n_rays, n * n), n_(n), n_angles_(n_angles), n_rays_(n_rays) {
  if (n < 2) throw std::invalid_argument("make_parallel_beam: n must be >= 2");
  if (n_angles < 1) throw std::invalid_argument("make_parallel_beam: n_angles must be >= 1");
  if (n_rays < 1) throw std::invalid_argument("make_parallel_beam: n_rays must be >= 1");

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(rows() * 2 * n));
  std::vector<double> ts;
  ts.reserve(static_cast<std::size_t>(2 * n + 4));
  for (Index k = 0; k < n_angles; ++k) {
    const double theta = angle(k);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (Index r = 0; r < n_rays; ++r) {
      const double offset = ray_offset(r);
      // Ray: {p : p . (c, s) = offset}, travelling along (-s, c).
      trace_ray(n, offset * c, offset * s, -s, c, ts, triplets, k * n_rays + r);
    }
  }
  system_.resize(rows(), cols());
  system_.setFromTriplets(triplets.begin(), triplets.end());
  system_.makeCompressed();
}

double ParallelBeam::angle(Index k) const noexcept {
  return std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_angles_);
}

double ParallelBeam::detector_width() const noexcept {
  return std::numbers::sqrt2 * static_cast<double>(n_) / static_cast<double>(n_rays_);
}

double ParallelBeam::ray_offset(Index r) const noexcept {
  const double span = std::numbers::sqrt2 * static_cast<double>(n_);
  return -0.5 * span + (static_cast<double>(r) + 0.5) * detector_width();
}

void ParallelBeam::do_apply(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const {
  out.noalias() = system_ * x;
}

void ParallelBeam::do_adjoint(const Eigen::Ref<const Vector>& y, Eigen::Ref<Vector> out) const {
  out.noalias() = system_.transpose() * y;
}

}  // namespace proxis
