#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library code it is used to check.

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

double normal_cdf(double x);

/// Kolmogorov-Smirnov statistic sup |F_n - F| of the samples against `cdf`.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Same statistic from CDF values already evaluated at the sorted samples.
double ks_statistic_sorted(const std::vector<double>& cdf_values);

/// KS p-value of the samples against the quadrature CDF.
class QuadratureCdf;
double ks_pvalue_against(std::vector<double> samples, const QuadratureCdf& cdf);

/// Asymptotic p-value of the one-sample KS test (Stephens' small-sample
/// correction of the Kolmogorov limit law).
double ks_pvalue(double d, std::size_t n);

/// CDF of an unnormalized density on (lo, hi) (hi may be +inf), built by
/// adaptive Gauss-Kronrod quadrature. `log_density` is evaluated relative to
/// its value at `anchor`, so large exponents do not overflow.
class QuadratureCdf {
 public:
  QuadratureCdf(std::function<double(double)> log_density, double lo, double hi, double anchor);
  double operator()(double x) const;
  /// CDF at every point of an ascending sequence, integrating only between
  /// neighbours.
  std::vector<double> at_sorted(const std::vector<double>& xs) const;
  double mean() const;
  double variance() const;

 private:
  double integrate(double a, double b, int moment) const;
  std::function<double(double)> logp_;
  double lo_, hi_, shift_;
  double total_ = 0.0;
};

/// Numerical rank from a full SVD with cutoff rel * sigma_max.
long dense_rank(const Matrix& S, double rel = 1e-10);

/// Minimizer of 1/2 ||z - v||^2 + t ||Dz||_1 (D the first-difference matrix)
/// by plain ADMM with rho = 1.
Vector tv1d_admm(const Vector& v, double t, int iterations);

/// Dense first-difference matrix, (n-1) x n.
Matrix difference_matrix(long n);

/// Exact minimizer of 1/2 (z - w)^T P (z - w) + gamma ||z||_1 for small n by
/// enumerating zero patterns and signs (3^n candidates).
Vector oblique_l1_prox(const Vector& w, const Matrix& P, double gamma);

}  // namespace oracle
