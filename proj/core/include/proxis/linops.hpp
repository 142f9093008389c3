#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace proxis {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Largest row or column count for which `LinearMap::to_dense` is allowed.
inline constexpr Index kDenseMaterializeLimit = 512;

enum class MapKind {
  identity,
  dense,
  toeplitz_blur_1d,
  finite_diff_1d,
  finite_diff_2d,
  parallel_beam,
  vertical_stack,
  scaled,
};

std::string_view to_string(MapKind kind) noexcept;

/// Matrix-free linear operator R^cols -> R^rows.
///
/// Concrete maps are immutable after construction; `apply` and
/// `adjoint_apply` may be called concurrently.
class LinearMap {
 public:
  virtual ~LinearMap() = default;
  LinearMap(const LinearMap&) = delete;
  LinearMap& operator=(const LinearMap&) = delete;

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  virtual MapKind kind() const noexcept = 0;

  /// Returns map * x. Throws DimensionError if x.size() != cols().
  Vector apply(const Vector& x) const;
  /// Returns map^T * y. Throws DimensionError if y.size() != rows().
  Vector adjoint_apply(const Vector& y) const;

  // Allocation-free variants; `out` must already have the right size.
  void apply_into(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const;
  void adjoint_apply_into(const Eigen::Ref<const Vector>& y,
                          Eigen::Ref<Vector> out) const;

  /// Exact sparse representation of the map.
  virtual SparseMatrix to_sparse() const = 0;
  /// Dense materialization; only for maps with rows, cols <= 512.
  Matrix to_dense() const;

 protected:
  LinearMap(Index rows, Index cols);

  virtual void do_apply(const Eigen::Ref<const Vector>& x,
                        Eigen::Ref<Vector> out) const = 0;
  virtual void do_adjoint(const Eigen::Ref<const Vector>& y,
                          Eigen::Ref<Vector> out) const = 0;

 private:
  Index rows_;
  Index cols_;
};

using LinearMapPtr = std::shared_ptr<const LinearMap>;

class IdentityMap final : public LinearMap {
 public:
  explicit IdentityMap(Index n);
  MapKind kind() const noexcept override { return MapKind::identity; }
  SparseMatrix to_sparse() const override;

 private:
  void do_apply(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const override;
  void do_adjoint(const Eigen::Ref<const Vector>& y, Eigen::Ref<Vector> out) const override;
};

class DenseMap final : public LinearMap {
 public:
  explicit DenseMap(Matrix m);
  MapKind kind() const noexcept override { return MapKind::dense; }
  SparseMatrix to_sparse() const override;
  const Matrix& matrix() const noexcept { return m_; }

 private:
  void do_apply(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const override;
  void do_adjoint(const Eigen::Ref<const Vector>& y, Eigen::Ref<Vector> out) const override;
  Matrix m_;
};

/// Symmetric Toeplitz Gaussian blur with zero boundary:
/// A_ij = h / (sigma sqrt(2 pi)) exp(-((h (i - j)) / sigma)^2 / 2).
class GaussianBlur1D final : public LinearMap {
 public:
  GaussianBlur1D(Index n, double sigma, double h);
  MapKind kind() const noexcept override { return MapKind::toeplitz_blur_1d; }
  SparseMatrix to_sparse() const override;

  double sigma() const noexcept { return sigma_; }
  double spacing() const noexcept { return h_; }
  /// kernel()[k] is the entry for |i - j| = k; trailing exact zeros are dropped.
  const Vector& kernel() const noexcept { return kernel_; }

 private:
  void do_apply(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const override;
  void do_adjoint(const Eigen::Ref<const Vector>& y, Eigen::Ref<Vector> out) const override;
  double sigma_;
  double h_;
  Vector kernel_;
};

/// (n-1) x n forward differences: (Dx)_i = x_{i+1} - x_i.
class FiniteDifference1D final : public LinearMap {
 public:
  explicit FiniteDifference1D(Index n);
  MapKind kind() const noexcept override { return MapKind::finite_diff_1d; }
  SparseMatrix to_sparse() const override;

 private:
  void do_apply(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const override;
  void do_adjoint(const Eigen::Ref<const Vector>& y, Eigen::Ref<Vector> out) const override;
};

/// Forward differences on an nx-by-ny image stored row-major (pixel
/// p = j * nx + i for column i and row j).
///
/// Rows: first the (nx-1)*ny horizontal differences x[j, i+1] - x[j, i], in
/// row-major order of (j, i); then the nx*(ny-1) vertical differences
/// x[j+1, i] - x[j, i].
class FiniteDifference2D final : public LinearMap {
 public:
  FiniteDifference2D(Index nx, Index ny);
  MapKind kind() const noexcept override { return MapKind::finite_diff_2d; }
  SparseMatrix to_sparse() const override;

  Index nx() const noexcept { return nx_; }
  Index ny() const noexcept { return ny_; }
  Index horizontal_rows() const noexcept { return (nx_ - 1) * ny_; }
  Index horizontal_row(Index i, Index j) const noexcept { return j * (nx_ - 1) + i; }
  Index vertical_row(Index i, Index j) const noexcept {
    return horizontal_rows() + j * nx_ + i;
  }

 private:
  void do_apply(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const override;
  void do_adjoint(const Eigen::Ref<const Vector>& y, Eigen::Ref<Vector> out) const override;
  Index nx_;
  Index ny_;
};

/// Ray-driven parallel-beam projector on an n-by-n image of unit pixels
/// centred at the origin. Row `k * n_rays + r` is the line integral along the
/// ray at angle k * 180 / n_angles degrees and detector offset
/// (r + 1/2) * w - n / sqrt(2), with w = n sqrt(2) / n_rays.
/// Entries are exact ray/pixel intersection lengths.
class ParallelBeam final : public LinearMap {
 public:
  ParallelBeam(Index n, Index n_angles, Index n_rays);
  MapKind kind() const noexcept override { return MapKind::parallel_beam; }
  SparseMatrix to_sparse() const override { return system_; }

  Index image_size() const noexcept { return n_; }
  Index n_angles() const noexcept { return n_angles_; }
  Index n_rays() const noexcept { return n_rays_; }
  double angle(Index k) const noexcept;       // radians
  double ray_offset(Index r) const noexcept;  // image units
  double detector_width() const noexcept;     // spacing between rays

 private:
  void do_apply(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const override;
  void do_adjoint(const Eigen::Ref<const Vector>& y, Eigen::Ref<Vector> out) const override;
  Index n_;
  Index n_angles_;
  Index n_rays_;
  SparseMatrix system_;
};

class VerticalStack final : public LinearMap {
 public:
  explicit VerticalStack(std::vector<LinearMapPtr> children);
  MapKind kind() const noexcept override { return MapKind::vertical_stack; }
  SparseMatrix to_sparse() const override;
  const std::vector<LinearMapPtr>& children() const noexcept { return children_; }

 private:
  void do_apply(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const override;
  void do_adjoint(const Eigen::Ref<const Vector>& y, Eigen::Ref<Vector> out) const override;
  std::vector<LinearMapPtr> children_;
};

class ScaledMap final : public LinearMap {
 public:
  ScaledMap(double scale, LinearMapPtr child);
  MapKind kind() const noexcept override { return MapKind::scaled; }
  SparseMatrix to_sparse() const override;
  double scale() const noexcept { return scale_; }
  const LinearMapPtr& child() const noexcept { return child_; }

 private:
  void do_apply(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const override;
  void do_adjoint(const Eigen::Ref<const Vector>& y, Eigen::Ref<Vector> out) const override;
  double scale_;
  LinearMapPtr child_;
};

LinearMapPtr make_identity(Index n);
LinearMapPtr make_dense(Matrix m);
LinearMapPtr make_gaussian_blur_1d(Index n, double sigma, double h);
LinearMapPtr make_finite_difference(Index n);
LinearMapPtr make_finite_difference(Index nx, Index ny);
LinearMapPtr make_parallel_beam(Index n, Index n_angles, Index n_rays);
LinearMapPtr make_vertical_stack(std::vector<LinearMapPtr> children);
LinearMapPtr make_scaled(double scale, LinearMapPtr child);

/// Relative adjoint mismatch |<Ax, y> - <x, A^T y>| / max(|<Ax,y>|, ||Ax|| ||y||).
double adjoint_mismatch(const LinearMap& map, const Vector& x, const Vector& y);

}  // namespace proxis
