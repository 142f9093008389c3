#pragma once

#include <limits>
#include <vector>

#include "proxis/linops.hpp"

namespace proxis {

/// Partition of {0, ..., dim-1} into blocks. Block b holds
/// indices[offsets[b] .. offsets[b+1]).
struct BlockPartition {
  std::vector<Index> indices;
  std::vector<Index> offsets{0};

  Index num_blocks() const noexcept { return static_cast<Index>(offsets.size()) - 1; }
  Index dimension() const noexcept { return static_cast<Index>(indices.size()); }
  Index block_size(Index b) const noexcept { return offsets[b + 1] - offsets[b]; }
  Index max_block_size() const noexcept;

  /// Throws std::invalid_argument unless this is a partition of {0..dim-1}.
  void validate(Index dim) const;
  bool operator==(const BlockPartition&) const = default;

  static BlockPartition uniform(Index dim, Index block_size);
  /// Pairs the horizontal and vertical forward difference that start at each
  /// pixel of an nx-by-ny image, using the row layout of FiniteDifference2D.
  /// Pixels on the last row/column get a block of size one (or none for the
  /// bottom-right corner).
  static BlockPartition isotropic_gradient(Index nx, Index ny);
};

/// Componentwise soft thresholding sign(v) max(|v| - t, 0).
Vector prox_l1(const Vector& v, double t);
void prox_l1_inplace(Eigen::Ref<Vector> v, double t);

/// Euclidean projection onto the box [lo, hi]^n.
Vector prox_box(const Vector& v, double lo, double hi);
void prox_box_inplace(Eigen::Ref<Vector> v, double lo, double hi);
inline Vector prox_nonnegative(const Vector& v) {
  return prox_box(v, 0.0, std::numeric_limits<double>::infinity());
}

/// Block shrinkage u * max(1 - t / ||u||, 0) for every block u.
Vector prox_group_l2(const Vector& v, const BlockPartition& blocks, double t);
void prox_group_l2_inplace(Eigen::Ref<Vector> v, const BlockPartition& blocks, double t);

/// Exact minimizer of 1/2 ||z - v||^2 + t sum_i |z_{i+1} - z_i|, computed with
/// Condat's direct (taut string) algorithm in O(n) typical time.
Vector prox_tv1d(const Vector& v, double t);
void prox_tv1d_into(const Eigen::Ref<const Vector>& v, double t, Eigen::Ref<Vector> out);

/// Prox of 1/2 ||z - d||^2 scaled by t: (v + t d) / (1 + t).
void prox_shifted_quadratic_inplace(Eigen::Ref<Vector> v, const Vector& offset, double t);

/// Oblique prox of f(z) = 1/2 ||D z - d||^2 in the norm of `precision`:
/// (P + D^T D)^{-1} (P v + D^T d). Throws SingularSystemError if P + D^T D is
/// not numerically positive definite.
Vector prox_quadratic(const Vector& v, const Matrix& precision, const Matrix& D,
                      const Vector& d);

}  // namespace proxis
