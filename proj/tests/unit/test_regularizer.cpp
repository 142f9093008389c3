#include <doctest.h>

#include <cmath>

#include "proxis/regularizer.hpp"
#include "proxis/rng.hpp"

using namespace proxis;

TEST_CASE("eval examples") {
  CHECK(Regularizer::l1(1.0).eval(Vector{{1.0, -2.0, 0.0}}).value == 3.0);

  const Regularizer nn = Regularizer::nonnegative();
  const ExtendedReal ok = nn.eval(Vector{{1.0, 0.0, 2.0}});
  CHECK(ok.finite);
  CHECK(ok.value == 0.0);
  CHECK_FALSE(nn.eval(Vector{{-1.0, 0.0, 0.0}}).finite);

  const Regularizer tv = Regularizer::tv1d(3, 2.0);
  CHECK(tv.eval(Vector{{0.0, 1.0, 1.0}}).value == 2.0);
}

TEST_CASE("box indicator and quadratic atoms") {
  const Regularizer box = Regularizer::box(0.0, 1.0);
  CHECK(box.eval(Vector{{0.0, 0.5, 1.0}}).finite);
  CHECK_FALSE(box.eval(Vector{{0.0, 1.5}}).finite);

  const Regularizer q = Regularizer::tikhonov(make_identity(2), Vector{{1.0, 1.0}}, 2.0);
  CHECK(q.eval(Vector{{1.0, 3.0}}).value == doctest::Approx(4.0));
  CHECK_FALSE(q.positive_homogeneous());
  CHECK_FALSE(q.polyhedral());
}

TEST_CASE("structural flags") {
  CHECK(Regularizer::tv1d(5, 1.0, true).positive_homogeneous());
  CHECK(Regularizer::tv1d(5, 1.0, true).polyhedral());
  CHECK(Regularizer::anisotropic_tv2d(4, 4, 1.0).polyhedral());
  CHECK(Regularizer::isotropic_tv2d(4, 4, 1.0).positive_homogeneous());
  CHECK_FALSE(Regularizer::isotropic_tv2d(4, 4, 1.0).polyhedral());
  CHECK_FALSE(Regularizer::box(0.2, 1.0).positive_homogeneous());
}

TEST_CASE("validate rejects inconsistent terms") {
  CHECK_NOTHROW(Regularizer::tv1d(6, 1.0).validate(6));
  CHECK_THROWS(Regularizer::tv1d(6, 1.0).validate(7));
  Regularizer bad;
  bad.add(Term{-1.0, nullptr, atom::L1{}});
  CHECK_THROWS(bad.validate(3));
}

TEST_CASE("convexity spot check on random triples") {
  Rng rng = make_rng(21);
  const std::vector<Regularizer> fs{Regularizer::l1(1.3), Regularizer::tv1d(10, 0.7),
                                    Regularizer::isotropic_tv2d(5, 2, 1.1),
                                    Regularizer::sparse_transform(make_finite_difference(10), 2.0)};
  for (const auto& f : fs) {
    for (int k = 0; k < 200; ++k) {
      const Vector x = standard_normal(rng, 10), y = standard_normal(rng, 10);
      const double mid = f.eval(0.5 * (x + y)).value;
      CHECK(mid <= 0.5 * f.eval(x).value + 0.5 * f.eval(y).value + 1e-12);
      CHECK(f.eval(x).value >= 0.0);
    }
  }
}

TEST_CASE("positive homogeneity including indicator terms") {
  Rng rng = make_rng(22);
  std::uniform_real_distribution<double> scale(0.0, 5.0);
  const std::vector<Regularizer> fs{Regularizer::l1(1.0), Regularizer::tv1d(8, 2.0, true),
                                    Regularizer::isotropic_tv2d(4, 2, 1.0, true)};
  for (const auto& f : fs) {
    REQUIRE(f.positive_homogeneous());
    for (int k = 0; k < 200; ++k) {
      const Vector x = standard_normal(rng, 8);
      const double a = scale(rng);
      const ExtendedReal lhs = f.eval(a * x);
      const ExtendedReal rhs = f.eval(x);
      if (!rhs.finite) {
        // Scaling by a > 0 keeps x outside the cone.
        if (a > 0.0) CHECK_FALSE(lhs.finite);
        continue;
      }
      CHECK(lhs.finite);
      CHECK(lhs.value == doctest::Approx(a * rhs.value).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("scaled multiplies only non-indicator weights") {
  const Regularizer f = Regularizer::tv1d(4, 2.0, true).scaled(3.0);
  const ExtendedReal v = f.eval(Vector{{0.0, 1.0, 1.0, 0.0}});
  CHECK(v.finite);
  CHECK(v.value == doctest::Approx(12.0));
  CHECK_FALSE(f.eval(Vector{{0.0, -1.0, 0.0, 0.0}}).finite);
}

TEST_CASE("identity bounds intersect box constraints") {
  Regularizer f = Regularizer::nonnegative();
  f.add(Term{1.0, nullptr, atom::Box{-1.0, 2.0}});
  double lo = 0, hi = 0;
  REQUIRE(f.identity_bounds(lo, hi));
  CHECK(lo == 0.0);
  CHECK(hi == 2.0);
  CHECK_FALSE(Regularizer::l1(1.0).identity_bounds(lo, hi));
}

TEST_CASE("prox_atom_inplace dispatches to the atom prox") {
  Vector v{{2.0, -0.1}};
  prox_atom_inplace(atom::L1{}, v, 0.5);
  CHECK(v == Vector{{1.5, 0.0}});
  Vector w{{-2.0, 3.0}};
  prox_atom_inplace(atom::NonNegative{}, w, 10.0);
  CHECK(w == Vector{{0.0, 3.0}});
  Vector z{{7.0}};
  prox_atom_inplace(atom::Zero{}, z, 1.0);
  CHECK(z[0] == 7.0);
}
