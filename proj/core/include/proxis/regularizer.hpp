#pragma once

#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "proxis/linops.hpp"
#include "proxis/prox.hpp"

namespace proxis {

/// Value in R u {+inf}. Indicator violations produce `infinity()` instead of
/// a raw IEEE infinity so callers have to look at `finite`.
struct ExtendedReal {
  double value = 0.0;
  bool finite = true;

  static ExtendedReal infinity() noexcept { return {std::numeric_limits<double>::infinity(), false}; }
  bool operator==(const ExtendedReal&) const = default;
};

namespace atom {
struct L1 {
  bool operator==(const L1&) const = default;
};
struct GroupL2 {
  BlockPartition blocks;
  bool operator==(const GroupL2&) const = default;
};
struct NonNegative {
  bool operator==(const NonNegative&) const = default;
};
struct Box {
  double lo = 0.0;
  double hi = 1.0;
  bool operator==(const Box&) const = default;
};
/// 1/2 ||z - offset||^2; an empty offset means zero.
struct Quadratic {
  Vector offset;
  bool operator==(const Quadratic& o) const {
    return offset.size() == o.offset.size() && offset == o.offset;
  }
};
struct Zero {
  bool operator==(const Zero&) const = default;
};
}  // namespace atom

using Atom = std::variant<atom::L1, atom::GroupL2, atom::NonNegative, atom::Box,
                          atom::Quadratic, atom::Zero>;

std::string atom_name(const Atom& a);
bool is_indicator(const Atom& a) noexcept;

/// One term weight * atom(transform * x). A null transform is the identity.
struct Term {
  double weight = 1.0;
  LinearMapPtr transform;
  Atom atom = atom::Zero{};

  Index output_dim(Index n) const noexcept { return transform ? transform->rows() : n; }
};

/// f(x) = sum_i weight_i * atom_i(L_i x).
class Regularizer {
 public:
  Regularizer() = default;
  explicit Regularizer(std::vector<Term> terms);

  Regularizer& add(Term term);
  const std::vector<Term>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  /// Throws std::invalid_argument on negative weights, mismatched transforms
  /// or group partitions that do not cover the transform output.
  void validate(Index n) const;

  ExtendedReal eval(const Vector& x) const;

  /// True iff every atom is a norm (l1, group-l2), a cone indicator, or
  /// zero, and no atom carries an offset.
  bool positive_homogeneous() const noexcept;
  /// True iff the epigraph is polyhedral: no quadratic atoms and no group-l2
  /// blocks of size greater than one.
  bool polyhedral() const noexcept;

  /// Copy with every non-indicator weight multiplied by `factor` (>= 0).
  Regularizer scaled(double factor) const;

  /// Intersection [lo, hi] of all identity-transform box/nonneg constraints.
  /// Returns false if there are none.
  bool identity_bounds(double& lo, double& hi) const noexcept;

  // Common regularizers.
  static Regularizer zero();
  static Regularizer l1(double gamma);
  static Regularizer nonnegative();
  static Regularizer box(double lo, double hi);
  static Regularizer tv1d(Index n, double gamma, bool nonnegative = false);
  static Regularizer anisotropic_tv2d(Index nx, Index ny, double gamma, bool nonnegative = false);
  static Regularizer isotropic_tv2d(Index nx, Index ny, double gamma, bool nonnegative = false);
  static Regularizer sparse_transform(LinearMapPtr transform, double gamma);
  static Regularizer tikhonov(LinearMapPtr transform, Vector offset, double weight);

 private:
  std::vector<Term> terms_;
};

/// Prox of t * atom evaluated in place (t is ignored by indicators).
void prox_atom_inplace(const Atom& a, Eigen::Ref<Vector> v, double t);

}  // namespace proxis
