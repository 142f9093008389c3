#include "proxis/linops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "proxis/error.hpp"

namespace proxis {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

std::string shape_message(const char* op, Index expected, Index got) {
  return std::string(op) + ": expected length " + std::to_string(expected) +
         ", got " + std::to_string(got);
}

}  // namespace

std::string_view to_string(MapKind kind) noexcept {
  switch (kind) {
    case MapKind::identity: return "identity";
    case MapKind::dense: return "dense";
    case MapKind::toeplitz_blur_1d: return "toeplitz-blur-1d";
    case MapKind::finite_diff_1d: return "finite-diff-1d";
    case MapKind::finite_diff_2d: return "finite-diff-2d";
    case MapKind::parallel_beam: return "parallel-beam";
    case MapKind::vertical_stack: return "vertical-stack";
    case MapKind::scaled: return "scaled";
  }
  return "unknown";
}

LinearMap::LinearMap(Index rows, Index cols) : rows_(rows), cols_(cols) {
  require(rows >= 0 && cols >= 0, "LinearMap: negative shape");
}

Vector LinearMap::apply(const Vector& x) const {
  if (x.size() != cols_) throw DimensionError(shape_message("apply", cols_, x.size()));
  Vector out(rows_);
  do_apply(x, out);
  return out;
}

Vector LinearMap::adjoint_apply(const Vector& y) const {
  if (y.size() != rows_) {
    throw DimensionError(shape_message("adjoint_apply", rows_, y.size()));
  }
  Vector out(cols_);
  do_adjoint(y, out);
  return out;
}

void LinearMap::apply_into(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const {
  if (x.size() != cols_) throw DimensionError(shape_message("apply", cols_, x.size()));
  if (out.size() != rows_) throw DimensionError(shape_message("apply(out)", rows_, out.size()));
  do_apply(x, out);
}

void LinearMap::adjoint_apply_into(const Eigen::Ref<const Vector>& y,
                                   Eigen::Ref<Vector> out) const {
  if (y.size() != rows_) {
    throw DimensionError(shape_message("adjoint_apply", rows_, y.size()));
  }
  if (out.size() != cols_) {
    throw DimensionError(shape_message("adjoint_apply(out)", cols_, out.size()));
  }
  do_adjoint(y, out);
}

Matrix LinearMap::to_dense() const {
  if (rows_ > kDenseMaterializeLimit || cols_ > kDenseMaterializeLimit) {
    throw std::length_error("to_dense: map larger than the dense materialization limit");
  }
  return Matrix(to_sparse());
}

// ---------------------------------------------------------------- identity

IdentityMap::IdentityMap(Index n) : LinearMap(n, n) {}

SparseMatrix IdentityMap::to_sparse() const {
  SparseMatrix s(rows(), cols());
  s.setIdentity();
  return s;
}

void IdentityMap::do_apply(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const {
  out = x;
}

void IdentityMap::do_adjoint(const Eigen::Ref<const Vector>& y, Eigen::Ref<Vector> out) const {
  out = y;
}

// ------------------------------------------------------------------- dense

DenseMap::DenseMap(Matrix m) : LinearMap(m.rows(), m.cols()), m_(std::move(m)) {}

SparseMatrix DenseMap::to_sparse() const { return m_.sparseView(); }

void DenseMap::do_apply(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const {
  out.noalias() = m_ * x;
}

void DenseMap::do_adjoint(const Eigen::Ref<const Vector>& y, Eigen::Ref<Vector> out) const {
  out.noalias() = m_.transpose() * y;
}

// -------------------------------------------------------------------- blur

GaussianBlur1D::GaussianBlur1D(Index n, double sigma, double h)
    : LinearMap(n, n), sigma_(sigma), h_(h) {
  require(n >= 2, "make_gaussian_blur_1d: n must be >= 2");
  require(sigma > 0.0 && std::isfinite(sigma), "make_gaussian_blur_1d: sigma must be > 0");
  require(h > 0.0 && std::isfinite(h), "make_gaussian_blur_1d: h must be > 0");
  const double scale = h / (sigma * std::sqrt(2.0 * std::numbers::pi));
  Vector k(n);
  Index support = 0;
  for (Index d = 0; d < n; ++d) {
    const double z = h * static_cast<double>(d) / sigma;
    k[d] = scale * std::exp(-0.5 * z * z);
    if (k[d] != 0.0) support = d + 1;
  }
  kernel_ = k.head(support);
}

SparseMatrix GaussianBlur1D::to_sparse() const {
  const Index n = rows();
  const Index w = kernel_.size();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(n * (2 * w - 1)));
  for (Index i = 0; i < n; ++i) {
    const Index lo = std::max<Index>(0, i - w + 1);
    const Index hi = std::min<Index>(n - 1, i + w - 1);
    for (Index j = lo; j <= hi; ++j) t.emplace_back(i, j, kernel_[std::abs(i - j)]);
  }
  SparseMatrix s(n, n);
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

void GaussianBlur1D::do_apply(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const {
  const Index n = rows();
  const Index w = kernel_.size();
  for (Index i = 0; i < n; ++i) {
    const Index lo = std::max<Index>(0, i - w + 1);
    const Index hi = std::min<Index>(n - 1, i + w - 1);
    double acc = 0.0;
    for (Index j = lo; j <= hi; ++j) acc += kernel_[std::abs(i - j)] * x[j];
    out[i] = acc;
  }
}

void GaussianBlur1D::do_adjoint(const Eigen::Ref<const Vector>& y, Eigen::Ref<Vector> out) const {
  do_apply(y, out);  // symmetric
}

// ------------------------------------------------------- finite difference

FiniteDifference1D::FiniteDifference1D(Index n) : LinearMap(n - 1, n) {
  require(n >= 2, "make_finite_difference: n must be >= 2");
}

SparseMatrix FiniteDifference1D::to_sparse() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(2 * rows()));
  for (Index i = 0; i < rows(); ++i) {
    t.emplace_back(i, i, -1.0);
    t.emplace_back(i, i + 1, 1.0);
  }
  SparseMatrix s(rows(), cols());
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

void FiniteDifference1D::do_apply(const Eigen::Ref<const Vector>& x,
                                  Eigen::Ref<Vector> out) const {
  const Index m = rows();
  out = x.tail(m) - x.head(m);
}

void FiniteDifference1D::do_adjoint(const Eigen::Ref<const Vector>& y,
                                    Eigen::Ref<Vector> out) const {
  const Index m = rows();
  out[0] = -y[0];
  for (Index j = 1; j < m; ++j) out[j] = y[j - 1] - y[j];
  out[m] = y[m - 1];
}

FiniteDifference2D::FiniteDifference2D(Index nx, Index ny)
    : LinearMap((nx - 1) * ny + nx * (ny - 1), nx * ny), nx_(nx), ny_(ny) {
  require(nx >= 2 && ny >= 2, "make_finite_difference: each dimension must be >= 2");
}

SparseMatrix FiniteDifference2D::to_sparse() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(2 * rows()));
  for (Index j = 0; j < ny_; ++j) {
    for (Index i = 0; i + 1 < nx_; ++i) {
      const Index r = horizontal_row(i, j);
      t.emplace_back(r, j * nx_ + i, -1.0);
      t.emplace_back(r, j * nx_ + i + 1, 1.0);
    }
  }
  for (Index j = 0; j + 1 < ny_; ++j) {
    for (Index i = 0; i < nx_; ++i) {
      const Index r = vertical_row(i, j);
      t.emplace_back(r, j * nx_ + i, -1.0);
      t.emplace_back(r, (j + 1) * nx_ + i, 1.0);
    }
  }
  SparseMatrix s(rows(), cols());
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

void FiniteDifference2D::do_apply(const Eigen::Ref<const Vector>& x,
                                  Eigen::Ref<Vector> out) const {
  for (Index j = 0; j < ny_; ++j) {
    for (Index i = 0; i + 1 < nx_; ++i) {
      out[horizontal_row(i, j)] = x[j * nx_ + i + 1] - x[j * nx_ + i];
    }
  }
  for (Index j = 0; j + 1 < ny_; ++j) {
    for (Index i = 0; i < nx_; ++i) {
      out[vertical_row(i, j)] = x[(j + 1) * nx_ + i] - x[j * nx_ + i];
    }
  }
}

void FiniteDifference2D::do_adjoint(const Eigen::Ref<const Vector>& y,
                                    Eigen::Ref<Vector> out) const {
  out.setZero();
  for (Index j = 0; j < ny_; ++j) {
    for (Index i = 0; i + 1 < nx_; ++i) {
      const double v = y[horizontal_row(i, j)];
      out[j * nx_ + i] -= v;
      out[j * nx_ + i + 1] += v;
    }
  }
  for (Index j = 0; j + 1 < ny_; ++j) {
    for (Index i = 0; i < nx_; ++i) {
      const double v = y[vertical_row(i, j)];
      out[j * nx_ + i] -= v;
      out[(j + 1) * nx_ + i] += v;
    }
  }
}

// --------------------------------------------------------- vertical stack

namespace {
Index total_rows(const std::vector<LinearMapPtr>& children) {
  Index r = 0;
  for (const auto& c : children) {
    require(c != nullptr, "make_vertical_stack: null child");
    r += c->rows();
  }
  return r;
}
Index common_cols(const std::vector<LinearMapPtr>& children) {
  require(!children.empty(), "make_vertical_stack: no children");
  const Index n = children.front()->cols();
  for (const auto& c : children) {
    if (c->cols() != n) throw DimensionError("make_vertical_stack: column counts differ");
  }
  return n;
}
}  // namespace

VerticalStack::VerticalStack(std::vector<LinearMapPtr> children)
    : LinearMap(total_rows(children), common_cols(children)), children_(std::move(children)) {}

SparseMatrix VerticalStack::to_sparse() const {
  std::vector<Eigen::Triplet<double>> t;
  Index offset = 0;
  for (const auto& c : children_) {
    const SparseMatrix s = c->to_sparse();
    for (Index r = 0; r < s.outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(s, r); it; ++it) {
        t.emplace_back(offset + it.row(), it.col(), it.value());
      }
    }
    offset += c->rows();
  }
  SparseMatrix s(rows(), cols());
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

void VerticalStack::do_apply(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const {
  Index offset = 0;
  for (const auto& c : children_) {
    c->apply_into(x, out.segment(offset, c->rows()));
    offset += c->rows();
  }
}

void VerticalStack::do_adjoint(const Eigen::Ref<const Vector>& y,
                               Eigen::Ref<Vector> out) const {
  out.setZero();
  Vector part(cols());
  Index offset = 0;
  for (const auto& c : children_) {
    c->adjoint_apply_into(y.segment(offset, c->rows()), part);
    out += part;
    offset += c->rows();
  }
}

// ------------------------------------------------------------------ scaled

ScaledMap::ScaledMap(double scale, LinearMapPtr child)
    : LinearMap(child ? child->rows() : 0, child ? child->cols() : 0),
      scale_(scale),
      child_(std::move(child)) {
  require(child_ != nullptr, "make_scaled: null child");
  require(std::isfinite(scale), "make_scaled: scale must be finite");
}

SparseMatrix ScaledMap::to_sparse() const { return scale_ * child_->to_sparse(); }

void ScaledMap::do_apply(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const {
  child_->apply_into(x, out);
  out *= scale_;
}

void ScaledMap::do_adjoint(const Eigen::Ref<const Vector>& y, Eigen::Ref<Vector> out) const {
  child_->adjoint_apply_into(y, out);
  out *= scale_;
}

// --------------------------------------------------------------- factories

LinearMapPtr make_identity(Index n) { return std::make_shared<IdentityMap>(n); }
LinearMapPtr make_dense(Matrix m) { return std::make_shared<DenseMap>(std::move(m)); }
LinearMapPtr make_gaussian_blur_1d(Index n, double sigma, double h) {
  return std::make_shared<GaussianBlur1D>(n, sigma, h);
}
LinearMapPtr make_finite_difference(Index n) {
  return std::make_shared<FiniteDifference1D>(n);
}
LinearMapPtr make_finite_difference(Index nx, Index ny) {
  return std::make_shared<FiniteDifference2D>(nx, ny);
}
LinearMapPtr make_parallel_beam(Index n, Index n_angles, Index n_rays) {
  return std::make_shared<ParallelBeam>(n, n_angles, n_rays);
}
LinearMapPtr make_vertical_stack(std::vector<LinearMapPtr> children) {
  return std::make_shared<VerticalStack>(std::move(children));
}
LinearMapPtr make_scaled(double scale, LinearMapPtr child) {
  return std::make_shared<ScaledMap>(scale, std::move(child));
}

double adjoint_mismatch(const LinearMap& map, const Vector& x, const Vector& y) {
  const Vector ax = map.apply(x);
  const Vector aty = map.adjoint_apply(y);
  const double lhs = ax.dot(y);
  const double rhs = x.dot(aty);
  const double scale = std::max({ax.norm() * y.norm(), x.norm() * aty.norm(),
                                 std::numeric_limits<double>::min()});
  return std::abs(lhs - rhs) / scale;
}

}  // namespace proxis
