#pragma once

#include "proxis/linops.hpp"
#include "proxis/regularizer.hpp"

namespace proxis {

inline constexpr double kDefaultSnapTolerance = 1e-6;

/// tol * max(1, ||x||_inf): the absolute threshold used for every zero/flat
/// test on x.
double absolute_tolerance(const Vector& x, double tol);

/// The face of the polyhedral partition containing x is (locally) the affine
/// set {z : S z = s}; its dimension is n - rank(S).
struct FaceInfo {
  Index dim = 0;
  SparseMatrix active_rows;  // S
  Vector active_rhs;         // s
  double tol_used = 0.0;     // absolute tolerance
  /// True when the regularizer has no polyhedral face structure (for example
  /// isotropic TV) and `dim` is only a snap-based estimate.
  bool heuristic = false;
};

/// Number of maximal runs of adjacent components that agree within the
/// tolerance.
Index count_flat_regions(const Vector& x, double tol = kDefaultSnapTolerance);
/// Same, but runs that touch zero (some member within tolerance of 0) are not
/// counted.
Index count_nonzero_flat_regions(const Vector& x, double tol = kDefaultSnapTolerance);

/// 4-connected flat regions of an nx-by-ny row-major image.
Index count_flat_regions_2d(const Vector& x, Index nx, Index ny,
                            double tol = kDefaultSnapTolerance);
Index count_nonzero_flat_regions_2d(const Vector& x, Index nx, Index ny,
                                    double tol = kDefaultSnapTolerance);

/// Closed-form face dimension for the supported families (nonnegativity, l1,
/// l1 of a full-row-rank transform, 1D/2D anisotropic TV, nonnegativity plus
/// 1D TV). Anything else goes to the rank oracle.
Index face_dimension(const Regularizer& f, const Vector& x, double tol = kDefaultSnapTolerance);

/// Assembles the active rows S of the face containing x and returns
/// n - rank(S), where singular values below 1e-10 * sigma_max count as zero.
FaceInfo face_info(const Regularizer& f, const Vector& x, double tol = kDefaultSnapTolerance);
Index face_dimension_rank_oracle(const Regularizer& f, const Vector& x,
                                 double tol = kDefaultSnapTolerance);

/// Numerical rank with relative singular value cutoff `rel`.
Index numerical_rank(const Matrix& S, double rel = 1e-10);
Index numerical_rank(const SparseMatrix& S, double rel = 1e-10);

/// Moves x onto the face its near-active pattern suggests: components within
/// tolerance of zero (or of a box bound) become exactly that value, and runs of
/// nearly equal neighbours under a difference transform are replaced by their
/// mean. Transforms without grid structure are handled by orthogonal
/// projection onto {z : S z = s}.
Vector snap_to_face(const Regularizer& f, const Vector& x, double tol = kDefaultSnapTolerance);

/// True if face dimensions for f are estimates (non-polyhedral terms).
bool face_dimension_is_heuristic(const Regularizer& f) noexcept;

}  // namespace proxis
