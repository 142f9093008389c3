#include "proxis/regularizer.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace proxis {

namespace {
template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_cone_box(const atom::Box& b) noexcept {
  const bool lo_ok = b.lo == 0.0 || b.lo == -kInf;
  const bool hi_ok = b.hi == 0.0 || b.hi == kInf;
  return lo_ok && hi_ok;
}
}  // namespace

std::string atom_name(const Atom& a) {
  return std::visit(Overloaded{
                        [](const atom::L1&) { return std::string("l1"); },
                        [](const atom::GroupL2&) { return std::string("group-l2"); },
                        [](const atom::NonNegative&) { return std::string("indicator-nonneg"); },
                        [](const atom::Box&) { return std::string("indicator-box"); },
                        [](const atom::Quadratic&) { return std::string("quadratic"); },
                        [](const atom::Zero&) { return std::string("zero"); },
                    },
                    a);
}

bool is_indicator(const Atom& a) noexcept {
  return std::holds_alternative<atom::NonNegative>(a) || std::holds_alternative<atom::Box>(a);
}

Regularizer::Regularizer(std::vector<Term> terms) : terms_(std::move(terms)) {}

Regularizer& Regularizer::add(Term term) {
  terms_.push_back(std::move(term));
  return *this;
}

void Regularizer::validate(Index n) const {
  for (const Term& t : terms_) {
    if (!(t.weight >= 0.0) || !std::isfinite(t.weight)) {
      throw std::invalid_argument("Regularizer: weights must be finite and >= 0");
    }
    if (t.transform && t.transform->cols() != n) {
      throw std::invalid_argument("Regularizer: transform column count does not match x");
    }
    const Index out = t.output_dim(n);
    if (const auto* g = std::get_if<atom::GroupL2>(&t.atom)) g->blocks.validate(out);
    if (const auto* b = std::get_if<atom::Box>(&t.atom); b && !(b->lo <= b->hi)) {
      throw std::invalid_argument("Regularizer: box requires lo <= hi");
    }
    if (const auto* q = std::get_if<atom::Quadratic>(&t.atom);
        q && q->offset.size() != 0 && q->offset.size() != out) {
      throw std::invalid_argument("Regularizer: quadratic offset has wrong length");
    }
  }
}

ExtendedReal Regularizer::eval(const Vector& x) const {
  double total = 0.0;
  for (const Term& t : terms_) {
    const Vector z = t.transform ? t.transform->apply(x) : x;
    bool feasible = true;
    const double v = std::visit(
        Overloaded{
            [&](const atom::L1&) { return z.lpNorm<1>(); },
            [&](const atom::GroupL2& g) {
              double s = 0.0;
              for (Index b = 0; b < g.blocks.num_blocks(); ++b) {
                double sq = 0.0;
                for (Index k = g.blocks.offsets[b]; k < g.blocks.offsets[b + 1]; ++k) {
                  sq += z[g.blocks.indices[k]] * z[g.blocks.indices[k]];
                }
                s += std::sqrt(sq);
              }
              return s;
            },
            [&](const atom::NonNegative&) {
              feasible = z.size() == 0 || z.minCoeff() >= 0.0;
              return 0.0;
            },
            [&](const atom::Box& b) {
              feasible = z.size() == 0 || (z.minCoeff() >= b.lo && z.maxCoeff() <= b.hi);
              return 0.0;
            },
            [&](const atom::Quadratic& q) {
              return 0.5 * (q.offset.size() == 0 ? z.squaredNorm() : (z - q.offset).squaredNorm());
            },
            [&](const atom::Zero&) { return 0.0; },
        },
        t.atom);
    if (!feasible) return ExtendedReal::infinity();
    if (!is_indicator(t.atom)) total += t.weight * v;
  }
  return {total, true};
}

bool Regularizer::positive_homogeneous() const noexcept {
  for (const Term& t : terms_) {
    const bool ok = std::visit(Overloaded{
                                   [](const atom::L1&) { return true; },
                                   [](const atom::GroupL2&) { return true; },
                                   [](const atom::NonNegative&) { return true; },
                                   [](const atom::Box& b) { return is_cone_box(b); },
                                   [](const atom::Quadratic&) { return false; },
                                   [](const atom::Zero&) { return true; },
                               },
                               t.atom);
    if (!ok) return false;
  }
  return true;
}

bool Regularizer::polyhedral() const noexcept {
  for (const Term& t : terms_) {
    if (std::holds_alternative<atom::Quadratic>(t.atom)) return false;
    if (const auto* g = std::get_if<atom::GroupL2>(&t.atom); g && g->blocks.max_block_size() > 1) {
      return false;
    }
  }
  return true;
}

Regularizer Regularizer::scaled(double factor) const {
  if (!(factor >= 0.0)) throw std::invalid_argument("Regularizer::scaled: factor must be >= 0");
  Regularizer out = *this;
  for (Term& t : out.terms_) {
    if (!is_indicator(t.atom)) t.weight *= factor;
  }
  return out;
}

bool Regularizer::identity_bounds(double& lo, double& hi) const noexcept {
  bool any = false;
  lo = -kInf;
  hi = kInf;
  for (const Term& t : terms_) {
    if (t.transform) continue;
    if (std::holds_alternative<atom::NonNegative>(t.atom)) {
      lo = std::max(lo, 0.0);
      any = true;
    } else if (const auto* b = std::get_if<atom::Box>(&t.atom)) {
      lo = std::max(lo, b->lo);
      hi = std::min(hi, b->hi);
      any = true;
    }
  }
  return any;
}

Regularizer Regularizer::zero() { return Regularizer{}; }

Regularizer Regularizer::l1(double gamma) { return Regularizer({Term{gamma, nullptr, atom::L1{}}}); }

Regularizer Regularizer::nonnegative() {
  return Regularizer({Term{1.0, nullptr, atom::NonNegative{}}});
}

Regularizer Regularizer::box(double lo, double hi) {
  return Regularizer({Term{1.0, nullptr, atom::Box{lo, hi}}});
}

Regularizer Regularizer::tv1d(Index n, double gamma, bool nonnegative) {
  Regularizer r;
  if (nonnegative) r.add(Term{1.0, nullptr, atom::NonNegative{}});
  r.add(Term{gamma, make_finite_difference(n), atom::L1{}});
  return r;
}

Regularizer Regularizer::anisotropic_tv2d(Index nx, Index ny, double gamma, bool nonnegative) {
  Regularizer r;
  if (nonnegative) r.add(Term{1.0, nullptr, atom::NonNegative{}});
  r.add(Term{gamma, make_finite_difference(nx, ny), atom::L1{}});
  return r;
}

Regularizer Regularizer::isotropic_tv2d(Index nx, Index ny, double gamma, bool nonnegative) {
  Regularizer r;
  if (nonnegative) r.add(Term{1.0, nullptr, atom::NonNegative{}});
  r.add(Term{gamma, make_finite_difference(nx, ny),
             atom::GroupL2{BlockPartition::isotropic_gradient(nx, ny)}});
  return r;
}

Regularizer Regularizer::sparse_transform(LinearMapPtr transform, double gamma) {
  return Regularizer({Term{gamma, std::move(transform), atom::L1{}}});
}

Regularizer Regularizer::tikhonov(LinearMapPtr transform, Vector offset, double weight) {
  return Regularizer({Term{weight, std::move(transform), atom::Quadratic{std::move(offset)}}});
}

void prox_atom_inplace(const Atom& a, Eigen::Ref<Vector> v, double t) {
  std::visit(Overloaded{
                 [&](const atom::L1&) { prox_l1_inplace(v, t); },
                 [&](const atom::GroupL2& g) { prox_group_l2_inplace(v, g.blocks, t); },
                 [&](const atom::NonNegative&) { prox_box_inplace(v, 0.0, kInf); },
                 [&](const atom::Box& b) { prox_box_inplace(v, b.lo, b.hi); },
                 [&](const atom::Quadratic& q) { prox_shifted_quadratic_inplace(v, q.offset, t); },
                 [&](const atom::Zero&) {},
             },
             a);
}

}  // namespace proxis
