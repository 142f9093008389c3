#include "proxis/faces.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include <Eigen/OrderingMethods>
#include <Eigen/SVD>
#include <Eigen/SparseQR>

#include "proxis/error.hpp"

namespace proxis {

namespace {

class UnionFind {
 public:
  explicit UnionFind(Index n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), Index{0});
  }
  Index find(Index i) {
    while (parent_[static_cast<std::size_t>(i)] != i) {
      auto& p = parent_[static_cast<std::size_t>(i)];
      p = parent_[static_cast<std::size_t>(p)];
      i = p;
    }
    return i;
  }
  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;  // smallest index is the root
  }

 private:
  std::vector<Index> parent_;
};

enum class Shape {
  ignore,         // no face structure (zero weight, quadratic, zero atom)
  identity_zero,  // zero pattern of x itself
  identity_box,   // x at a finite box bound
  diff1d,         // l1 of 1D differences
  diff2d,         // l1 of 2D differences
  generic_l1,     // l1 of another transform
  group,          // group-l2 with blocks larger than one
};

bool cone_box(const atom::Box& b) {
  const double inf = std::numeric_limits<double>::infinity();
  return (b.lo == 0.0 || b.lo == -inf) && (b.hi == 0.0 || b.hi == inf);
}

Shape classify(const Term& t) {
  if (std::holds_alternative<atom::Zero>(t.atom) || std::holds_alternative<atom::Quadratic>(t.atom)) {
    return Shape::ignore;
  }
  if (!is_indicator(t.atom) && t.weight == 0.0) return Shape::ignore;
  if (const auto* g = std::get_if<atom::GroupL2>(&t.atom); g && g->blocks.max_block_size() > 1) {
    return Shape::group;
  }
  const bool l1_like = std::holds_alternative<atom::L1>(t.atom) ||
                       std::holds_alternative<atom::GroupL2>(t.atom);
  if (!t.transform) {
    if (const auto* b = std::get_if<atom::Box>(&t.atom); b && !cone_box(*b)) {
      return Shape::identity_box;
    }
    return Shape::identity_zero;
  }
  if (!l1_like) return Shape::generic_l1;  // indicator of a transformed cone
  switch (t.transform->kind()) {
    case MapKind::finite_diff_1d: return Shape::diff1d;
    case MapKind::finite_diff_2d: return Shape::diff2d;
    case MapKind::identity: return Shape::identity_zero;
    default: return Shape::generic_l1;
  }
}

// Pixel pair joined by row r of a difference transform.
std::pair<Index, Index> diff_pair(const LinearMap& map, Index r) {
  if (map.kind() == MapKind::finite_diff_1d) return {r, r + 1};
  const auto& fd = static_cast<const FiniteDifference2D&>(map);
  const Index nx = fd.nx();
  if (r < fd.horizontal_rows()) {
    const Index j = r / (nx - 1), i = r % (nx - 1);
    return {j * nx + i, j * nx + i + 1};
  }
  const Index rv = r - fd.horizontal_rows();
  return {rv, rv + nx};
}

Vector transformed(const Term& t, const Vector& x) { return t.transform ? t.transform->apply(x) : x; }

// Rows of z (a transform output) that are active for term t: scalar entries
// within tolerance, or whole blocks whose norm is within tolerance.
std::vector<Index> active_outputs(const Term& t, const Vector& z, double tol) {
  std::vector<Index> rows;
  if (const auto* g = std::get_if<atom::GroupL2>(&t.atom)) {
    for (Index b = 0; b < g->blocks.num_blocks(); ++b) {
      double sq = 0.0;
      for (Index k = g->blocks.offsets[b]; k < g->blocks.offsets[b + 1]; ++k) {
        sq += z[g->blocks.indices[k]] * z[g->blocks.indices[k]];
      }
      if (std::sqrt(sq) <= tol) {
        for (Index k = g->blocks.offsets[b]; k < g->blocks.offsets[b + 1]; ++k) {
          rows.push_back(g->blocks.indices[k]);
        }
      }
    }
    std::sort(rows.begin(), rows.end());
    return rows;
  }
  for (Index r = 0; r < z.size(); ++r) {
    if (std::abs(z[r]) <= tol) rows.push_back(r);
  }
  return rows;
}

}  // namespace

double absolute_tolerance(const Vector& x, double tol) {
  const double scale = x.size() == 0 ? 0.0 : x.lpNorm<Eigen::Infinity>();
  return tol * std::max(1.0, scale);
}

Index count_flat_regions(const Vector& x, double tol) {
  if (x.size() == 0) return 0;
  const double t = absolute_tolerance(x, tol);
  Index regions = 1;
  for (Index i = 0; i + 1 < x.size(); ++i) {
    if (std::abs(x[i + 1] - x[i]) > t) ++regions;
  }
  return regions;
}

Index count_nonzero_flat_regions(const Vector& x, double tol) {
  const double t = absolute_tolerance(x, tol);
  Index regions = 0;
  Index i = 0;
  while (i < x.size()) {
    bool zero = std::abs(x[i]) <= t;
    Index j = i;
    while (j + 1 < x.size() && std::abs(x[j + 1] - x[j]) <= t) {
      ++j;
      zero = zero || std::abs(x[j]) <= t;
    }
    if (!zero) ++regions;
    i = j + 1;
  }
  return regions;
}

namespace {

Index count_regions_2d(const Vector& x, Index nx, Index ny, double tol, bool skip_zero) {
  if (nx * ny != x.size()) throw DimensionError("count_flat_regions_2d: nx * ny != x.size()");
  const double t = absolute_tolerance(x, tol);
  UnionFind uf(x.size());
  for (Index j = 0; j < ny; ++j) {
    for (Index i = 0; i < nx; ++i) {
      const Index p = j * nx + i;
      if (i + 1 < nx && std::abs(x[p + 1] - x[p]) <= t) uf.unite(p, p + 1);
      if (j + 1 < ny && std::abs(x[p + nx] - x[p]) <= t) uf.unite(p, p + nx);
    }
  }
  std::vector<char> is_root(static_cast<std::size_t>(x.size()), 0);
  std::vector<char> touches_zero(static_cast<std::size_t>(x.size()), 0);
  for (Index p = 0; p < x.size(); ++p) {
    const auto r = static_cast<std::size_t>(uf.find(p));
    is_root[r] = 1;
    if (std::abs(x[p]) <= t) touches_zero[r] = 1;
  }
  Index count = 0;
  for (std::size_t r = 0; r < is_root.size(); ++r) {
    if (is_root[r] && !(skip_zero && touches_zero[r])) ++count;
  }
  return count;
}

}  // namespace

Index count_flat_regions_2d(const Vector& x, Index nx, Index ny, double tol) {
  return count_regions_2d(x, nx, ny, tol, false);
}

Index count_nonzero_flat_regions_2d(const Vector& x, Index nx, Index ny, double tol) {
  return count_regions_2d(x, nx, ny, tol, true);
}

// ---------------------------------------------------------------- rank

Index numerical_rank(const Matrix& S, double rel) {
  if (S.size() == 0) return 0;
  const Eigen::BDCSVD<Matrix> svd(S);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  const double cut = rel * sv[0];
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i) r += sv[i] > cut ? 1 : 0;
  return r;
}

Index numerical_rank(const SparseMatrix& S, double rel) {
  if (S.rows() == 0 || S.nonZeros() == 0) return 0;
  if (S.cols() <= 1024 && S.rows() <= 4096) return numerical_rank(Matrix(S), rel);
  // Large systems: rank-revealing sparse QR on S^T S would square the
  // conditioning, so factor S itself.
  Eigen::SparseMatrix<double, Eigen::ColMajor> cm = S;
  cm.makeCompressed();
  Eigen::SparseQR<Eigen::SparseMatrix<double, Eigen::ColMajor>, Eigen::COLAMDOrdering<int>> qr;
  qr.setPivotThreshold(rel * std::sqrt(static_cast<double>(S.rows())));
  qr.compute(cm);
  return qr.rank();
}

// ------------------------------------------------------------- oracle

FaceInfo face_info(const Regularizer& f, const Vector& x, double tol) {
  const Index n = x.size();
  FaceInfo info;
  info.tol_used = absolute_tolerance(x, tol);
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> rhs;
  Index row = 0;
  for (const Term& t : f.terms()) {
    const Shape shape = classify(t);
    if (shape == Shape::ignore) continue;
    if (shape == Shape::group) info.heuristic = true;
    if (shape == Shape::identity_box) {
      const auto& b = std::get<atom::Box>(t.atom);
      for (Index i = 0; i < n; ++i) {
        double target = 0.0;
        if (std::abs(x[i] - b.lo) <= info.tol_used) {
          target = b.lo;
        } else if (std::abs(x[i] - b.hi) <= info.tol_used) {
          target = b.hi;
        } else {
          continue;
        }
        trip.emplace_back(row++, i, 1.0);
        rhs.push_back(target);
      }
      continue;
    }
    const Vector z = transformed(t, x);
    const std::vector<Index> act = active_outputs(t, z, info.tol_used);
    if (act.empty()) continue;
    if (!t.transform) {
      for (Index i : act) {
        trip.emplace_back(row++, i, 1.0);
        rhs.push_back(0.0);
      }
      continue;
    }
    const SparseMatrix D = t.transform->to_sparse();
    for (Index r : act) {
      for (SparseMatrix::InnerIterator it(D, r); it; ++it) trip.emplace_back(row, it.col(), it.value());
      ++row;
      rhs.push_back(0.0);
    }
  }
  info.active_rows.resize(row, n);
  info.active_rows.setFromTriplets(trip.begin(), trip.end());
  info.active_rhs = Eigen::Map<const Vector>(rhs.data(), static_cast<Index>(rhs.size()));
  info.dim = n - numerical_rank(info.active_rows);
  return info;
}

Index face_dimension_rank_oracle(const Regularizer& f, const Vector& x, double tol) {
  return face_info(f, x, tol).dim;
}

// -------------------------------------------------------- closed form

Index face_dimension(const Regularizer& f, const Vector& x, double tol) {
  const Index n = x.size();
  bool id_zero = false;
  const Term* diff1 = nullptr;
  const Term* diff2 = nullptr;
  const Term* generic = nullptr;
  int n_generic = 0;
  int n_diff = 0;
  bool other = false;
  for (const Term& t : f.terms()) {
    switch (classify(t)) {
      case Shape::ignore: break;
      case Shape::identity_zero: id_zero = true; break;
      case Shape::diff1d: diff1 = &t; ++n_diff; break;
      case Shape::diff2d: diff2 = &t; ++n_diff; break;
      case Shape::generic_l1:
        generic = &t;
        ++n_generic;
        other = other || !std::holds_alternative<atom::L1>(t.atom);
        break;
      case Shape::identity_box:
      case Shape::group: other = true; break;
    }
  }
  if (other || n_diff > 1 || (n_generic > 0 && (n_diff > 0 || id_zero || n_generic > 1))) {
    return face_dimension_rank_oracle(f, x, tol);
  }
  const double t = absolute_tolerance(x, tol);
  if (n_generic == 1) {
    const Vector z = generic->transform->apply(x);
    const SparseMatrix D = generic->transform->to_sparse();
    const Index rank = numerical_rank(D);
    if (D.rows() > n || rank != D.rows()) return face_dimension_rank_oracle(f, x, tol);
    Index nnz = 0;
    for (Index r = 0; r < z.size(); ++r) nnz += std::abs(z[r]) > t ? 1 : 0;
    return nnz + n - rank;
  }
  if (diff1) return id_zero ? count_nonzero_flat_regions(x, tol) : count_flat_regions(x, tol);
  if (diff2) {
    if (id_zero) return face_dimension_rank_oracle(f, x, tol);
    const auto& fd = static_cast<const FiniteDifference2D&>(*diff2->transform);
    return count_flat_regions_2d(x, fd.nx(), fd.ny(), tol);
  }
  if (id_zero) {
    Index nnz = 0;
    for (Index i = 0; i < n; ++i) nnz += std::abs(x[i]) > t ? 1 : 0;
    return nnz;
  }
  return n;
}

bool face_dimension_is_heuristic(const Regularizer& f) noexcept {
  for (const Term& t : f.terms()) {
    if (const auto* g = std::get_if<atom::GroupL2>(&t.atom); g && g->blocks.max_block_size() > 1) {
      return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------- snap

Vector snap_to_face(const Regularizer& f, const Vector& x, double tol) {
  const Index n = x.size();
  const double t = absolute_tolerance(x, tol);

  bool needs_projection = false;
  for (const Term& term : f.terms()) {
    const Shape s = classify(term);
    if (s == Shape::generic_l1) needs_projection = true;
    if (s == Shape::group && term.transform && term.transform->kind() != MapKind::finite_diff_1d &&
        term.transform->kind() != MapKind::finite_diff_2d) {
      needs_projection = true;
    }
  }

  if (needs_projection) {
    const FaceInfo info = face_info(f, x, tol);
    if (info.active_rows.rows() == 0 || n > kDenseMaterializeLimit) return x;
    const Matrix S(info.active_rows);
    const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(S);
    Vector out = x - cod.solve(S * x - info.active_rhs);
    return out;
  }

  UnionFind uf(n);
  std::vector<std::optional<double>> pin(static_cast<std::size_t>(n));
  for (const Term& term : f.terms()) {
    const Shape s = classify(term);
    if (s == Shape::ignore) continue;
    if (s == Shape::identity_box) {
      const auto& b = std::get<atom::Box>(term.atom);
      for (Index i = 0; i < n; ++i) {
        if (std::abs(x[i] - b.lo) <= t) {
          pin[static_cast<std::size_t>(i)] = b.lo;
        } else if (std::abs(x[i] - b.hi) <= t) {
          pin[static_cast<std::size_t>(i)] = b.hi;
        }
      }
      continue;
    }
    const Vector z = transformed(term, x);
    const std::vector<Index> act = active_outputs(term, z, t);
    if (!term.transform || term.transform->kind() == MapKind::identity) {
      for (Index i : act) pin[static_cast<std::size_t>(i)] = 0.0;
      continue;
    }
    for (Index r : act) {
      const auto [p, q] = diff_pair(*term.transform, r);
      uf.unite(p, q);
    }
  }

  std::vector<double> sum(static_cast<std::size_t>(n), 0.0);
  std::vector<Index> count(static_cast<std::size_t>(n), 0);
  std::vector<std::optional<double>> region_pin(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(uf.find(i));
    sum[r] += x[i];
    ++count[r];
    if (pin[static_cast<std::size_t>(i)] && !region_pin[r]) region_pin[r] = pin[static_cast<std::size_t>(i)];
  }
  Vector out(n);
  for (Index i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(uf.find(i));
    out[i] = region_pin[r] ? *region_pin[r] : sum[r] / static_cast<double>(count[r]);
  }
  return out;
}

}  // namespace proxis
