#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "proxis/error.hpp"
#include "proxis/sampler.hpp"

namespace proxis {

bool check_source_condition(const LinearMap& A, const Regularizer& f, const Vector& x0, double tol,
                            double support_tol) {
  const auto& terms = f.terms();
  if (terms.size() != 1 || terms[0].transform || !std::holds_alternative<atom::L1>(terms[0].atom)) {
    throw UnsupportedRegularizerError("check_source_condition: only gamma * ||x||_1 is supported");
  }
  const Index n = A.cols();
  if (x0.size() != n) throw DimensionError("check_source_condition: x0 has wrong length");
  const double gamma = terms[0].weight;

  // Orthonormal basis of range(A^T) = row space of A.
  const Matrix At = A.to_dense().transpose();
  const Eigen::BDCSVD<Matrix> svd(At, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) rank += (sv[0] > 0.0 && sv[i] > 1e-10 * sv[0]) ? 1 : 0;
  const Matrix Q = svd.matrixU().leftCols(rank);

  const double zero_tol = absolute_tolerance(x0, support_tol);
  auto project_set = [&](const Vector& v) {
    Vector out(n);
    for (Index i = 0; i < n; ++i) {
      if (std::abs(x0[i]) > zero_tol) {
        out[i] = std::copysign(gamma, x0[i]);
      } else {
        out[i] = std::clamp(v[i], -gamma, gamma);
      }
    }
    return out;
  };

  const double target = tol * std::max(1.0, gamma);
  Vector v = project_set(Vector::Zero(n));
  for (int it = 0; it < 10000; ++it) {
    const Vector w = Q * (Q.transpose() * v);
    const Vector v_next = project_set(w);
    if ((w - v_next).norm() < target) return true;
    v = v_next;
  }
  return false;
}

}  // namespace proxis
