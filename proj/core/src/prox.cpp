#include "proxis/prox.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "proxis/error.hpp"

namespace proxis {

// ---------------------------------------------------------- BlockPartition

Index BlockPartition::max_block_size() const noexcept {
  Index m = 0;
  for (Index b = 0; b < num_blocks(); ++b) m = std::max(m, block_size(b));
  return m;
}

void BlockPartition::validate(Index dim) const {
  if (offsets.empty() || offsets.front() != 0 || offsets.back() != dimension()) {
    throw std::invalid_argument("BlockPartition: malformed offsets");
  }
  if (dimension() != dim) throw std::invalid_argument("BlockPartition: wrong dimension");
  std::vector<char> seen(static_cast<std::size_t>(dim), 0);
  for (Index b = 0; b < num_blocks(); ++b) {
    if (offsets[b + 1] < offsets[b]) throw std::invalid_argument("BlockPartition: bad offsets");
  }
  for (Index i : indices) {
    if (i < 0 || i >= dim || seen[static_cast<std::size_t>(i)]) {
      throw std::invalid_argument("BlockPartition: blocks do not partition the index set");
    }
    seen[static_cast<std::size_t>(i)] = 1;
  }
}

BlockPartition BlockPartition::uniform(Index dim, Index block_size) {
  if (block_size < 1 || dim % block_size != 0) {
    throw std::invalid_argument("BlockPartition::uniform: block size must divide dim");
  }
  BlockPartition p;
  p.indices.resize(static_cast<std::size_t>(dim));
  for (Index i = 0; i < dim; ++i) p.indices[static_cast<std::size_t>(i)] = i;
  for (Index b = 1; b <= dim / block_size; ++b) p.offsets.push_back(b * block_size);
  return p;
}

BlockPartition BlockPartition::isotropic_gradient(Index nx, Index ny) {
  const FiniteDifference2D layout(nx, ny);
  BlockPartition p;
  p.indices.reserve(static_cast<std::size_t>(layout.rows()));
  for (Index j = 0; j < ny; ++j) {
    for (Index i = 0; i < nx; ++i) {
      const auto before = p.indices.size();
      if (i + 1 < nx) p.indices.push_back(layout.horizontal_row(i, j));
      if (j + 1 < ny) p.indices.push_back(layout.vertical_row(i, j));
      if (p.indices.size() != before) p.offsets.push_back(static_cast<Index>(p.indices.size()));
    }
  }
  return p;
}

// -------------------------------------------------------------------- atoms

void prox_l1_inplace(Eigen::Ref<Vector> v, double t) {
  if (t <= 0.0) return;
  for (Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]) - t;
    v[i] = a > 0.0 ? std::copysign(a, v[i]) : 0.0;
  }
}

Vector prox_l1(const Vector& v, double t) {
  if (t < 0.0) throw std::invalid_argument("prox_l1: threshold must be >= 0");
  Vector out = v;
  prox_l1_inplace(out, t);
  return out;
}

void prox_box_inplace(Eigen::Ref<Vector> v, double lo, double hi) {
  for (Index i = 0; i < v.size(); ++i) v[i] = std::clamp(v[i], lo, hi);
}

Vector prox_box(const Vector& v, double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("prox_box: require lo <= hi");
  Vector out = v;
  prox_box_inplace(out, lo, hi);
  return out;
}

void prox_group_l2_inplace(Eigen::Ref<Vector> v, const BlockPartition& blocks, double t) {
  if (t <= 0.0) return;
  for (Index b = 0; b < blocks.num_blocks(); ++b) {
    if (blocks.block_size(b) == 1) {
      // Soft thresholding, so scalar blocks agree with prox_l1 bit for bit.
      double& x = v[blocks.indices[blocks.offsets[b]]];
      const double a = std::abs(x) - t;
      x = a > 0.0 ? std::copysign(a, x) : 0.0;
      continue;
    }
    double sq = 0.0;
    for (Index k = blocks.offsets[b]; k < blocks.offsets[b + 1]; ++k) {
      const double x = v[blocks.indices[k]];
      sq += x * x;
    }
    const double norm = std::sqrt(sq);
    const double factor = norm > t ? 1.0 - t / norm : 0.0;
    for (Index k = blocks.offsets[b]; k < blocks.offsets[b + 1]; ++k) {
      v[blocks.indices[k]] *= factor;
    }
  }
}

Vector prox_group_l2(const Vector& v, const BlockPartition& blocks, double t) {
  if (t < 0.0) throw std::invalid_argument("prox_group_l2: threshold must be >= 0");
  blocks.validate(v.size());
  Vector out = v;
  prox_group_l2_inplace(out, blocks, t);
  return out;
}

void prox_shifted_quadratic_inplace(Eigen::Ref<Vector> v, const Vector& offset, double t) {
  if (t <= 0.0) return;
  if (offset.size() == 0) {
    v /= (1.0 + t);
  } else {
    v = (v + t * offset) / (1.0 + t);
  }
}

// ------------------------------------------------------------------- TV 1D

void prox_tv1d_into(const Eigen::Ref<const Vector>& in, double lambda, Eigen::Ref<Vector> out) {
  // Condat, "A direct algorithm for 1D total variation denoising" (2013).
  const Index n = in.size();
  if (n == 0) return;
  if (lambda <= 0.0 || n == 1) {
    out = in;
    return;
  }
  const double two_lambda = 2.0 * lambda;
  const double min_lambda = -lambda;
  Index k = 0, k0 = 0, kplus = 0, kminus = 0;
  double umin = lambda, umax = min_lambda;
  double vmin = in[0] - lambda, vmax = in[0] + lambda;

  for (;;) {
    while (k == n - 1) {
      if (umin < 0.0) {
        do out[k0++] = vmin; while (k0 <= kminus);
        k = kminus = k0;
        vmin = in[k];
        umin = lambda;
        umax = vmin + umin - vmax;
      } else if (umax > 0.0) {
        do out[k0++] = vmax; while (k0 <= kplus);
        k = kplus = k0;
        vmax = in[k];
        umax = min_lambda;
        umin = vmax + umax - vmin;
      } else {
        vmin += umin / static_cast<double>(k - k0 + 1);
        do out[k0++] = vmin; while (k0 <= k);
        return;
      }
    }
    umin += in[k + 1] - vmin;
    if (umin < min_lambda) {
      do out[k0++] = vmin; while (k0 <= kminus);
      k = kminus = kplus = k0;
      vmin = in[k];
      vmax = vmin + two_lambda;
      umin = lambda;
      umax = min_lambda;
      continue;
    }
    umax += in[k + 1] - vmax;
    if (umax > lambda) {
      do out[k0++] = vmax; while (k0 <= kplus);
      k = kminus = kplus = k0;
      vmax = in[k];
      vmin = vmax - two_lambda;
      umin = lambda;
      umax = min_lambda;
      continue;
    }
    ++k;
    if (umin >= lambda) {
      kminus = k;
      vmin += (umin - lambda) / static_cast<double>(kminus - k0 + 1);
      umin = lambda;
    }
    if (umax <= min_lambda) {
      kplus = k;
      vmax += (umax + lambda) / static_cast<double>(kplus - k0 + 1);
      umax = min_lambda;
    }
  }
}

Vector prox_tv1d(const Vector& v, double t) {
  if (t < 0.0) throw std::invalid_argument("prox_tv1d: threshold must be >= 0");
  Vector out(v.size());
  prox_tv1d_into(v, t, out);
  return out;
}

// ------------------------------------------------------- oblique quadratic

Vector prox_quadratic(const Vector& v, const Matrix& precision, const Matrix& D,
                      const Vector& d) {
  const Index n = v.size();
  if (precision.rows() != n || precision.cols() != n || D.cols() != n || D.rows() != d.size()) {
    throw DimensionError("prox_quadratic: inconsistent dimensions");
  }
  if (!precision.isApprox(precision.transpose(), 1e-12)) {
    throw SingularSystemError("prox_quadratic: precision matrix is not symmetric");
  }
  if (Eigen::LLT<Matrix>(precision).info() != Eigen::Success) {
    throw SingularSystemError("prox_quadratic: precision matrix is not positive definite");
  }
  const Matrix system = precision + D.transpose() * D;
  const Eigen::LLT<Matrix> llt(system);
  if (llt.info() != Eigen::Success) {
    throw SingularSystemError("prox_quadratic: factorization failed");
  }
  return llt.solve(precision * v + D.transpose() * d);
}

}  // namespace proxis
