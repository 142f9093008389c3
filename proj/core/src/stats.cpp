#include "proxis/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace proxis {

namespace {

void require_nonempty(const Matrix& ensemble) {
  if (ensemble.rows() == 0) throw std::invalid_argument("empty ensemble");
}

double sorted_quantile(const std::vector<double>& s, double q) {
  const double h = static_cast<double>(s.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= s.size()) return s.back();
  return s[lo] + (h - static_cast<double>(lo)) * (s[lo + 1] - s[lo]);
}

}  // namespace

Vector componentwise_quantile(const Matrix& ensemble, double q) {
  require_nonempty(ensemble);
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("componentwise_quantile: q not in [0, 1]");
  Vector out(ensemble.cols());
  std::vector<double> col(static_cast<std::size_t>(ensemble.rows()));
  for (Index j = 0; j < ensemble.cols(); ++j) {
    for (Index i = 0; i < ensemble.rows(); ++i) col[static_cast<std::size_t>(i)] = ensemble(i, j);
    std::sort(col.begin(), col.end());
    out[j] = sorted_quantile(col, q);
  }
  return out;
}

Vector componentwise_median(const Matrix& ensemble) { return componentwise_quantile(ensemble, 0.5); }

Vector componentwise_mean(const Matrix& ensemble) {
  require_nonempty(ensemble);
  return ensemble.colwise().mean().transpose();
}

CredibleIntervals credible_intervals(const Matrix& ensemble, double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("credible_intervals: level not in (0, 1)");
  require_nonempty(ensemble);
  CredibleIntervals ci;
  ci.lo.resize(ensemble.cols());
  ci.hi.resize(ensemble.cols());
  const double q_lo = 0.5 * (1.0 - level);
  const double q_hi = 0.5 * (1.0 + level);
  std::vector<double> col(static_cast<std::size_t>(ensemble.rows()));
  for (Index j = 0; j < ensemble.cols(); ++j) {
    for (Index i = 0; i < ensemble.rows(); ++i) col[static_cast<std::size_t>(i)] = ensemble(i, j);
    std::sort(col.begin(), col.end());
    ci.lo[j] = sorted_quantile(col, q_lo);
    ci.hi[j] = sorted_quantile(col, q_hi);
  }
  return ci;
}

Vector credible_interval_width(const Matrix& ensemble, double level) {
  return credible_intervals(ensemble, level).width();
}

std::map<Index, Index> sparsity_histogram(const Matrix& ensemble, const Regularizer& f, double tol) {
  std::map<Index, Index> hist;
  for (Index i = 0; i < ensemble.rows(); ++i) {
    ++hist[face_dimension(f, ensemble.row(i).transpose(), tol)];
  }
  return hist;
}

Vector chain_autocorrelation(const std::vector<double>& chain, Index max_lag) {
  const auto n = static_cast<Index>(chain.size());
  if (max_lag < 0 || n <= max_lag) {
    throw std::invalid_argument("chain_autocorrelation: chain must be longer than max_lag");
  }
  double mean = 0.0;
  for (double v : chain) mean += v;
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  for (double v : chain) c0 += (v - mean) * (v - mean);
  Vector acf = Vector::Ones(max_lag + 1);
  if (c0 == 0.0) return acf;
  for (Index k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (Index t = 0; t + k < n; ++t) {
      ck += (chain[static_cast<std::size_t>(t)] - mean) * (chain[static_cast<std::size_t>(t + k)] - mean);
    }
    acf[k] = ck / c0;
  }
  return acf;
}

EnsembleSummary summarize(const Matrix& ensemble, double level, const Regularizer* f, double tol) {
  EnsembleSummary s;
  s.n_samples = ensemble.rows();
  s.level = level;
  s.median = componentwise_median(ensemble);
  s.mean = componentwise_mean(ensemble);
  CredibleIntervals ci = credible_intervals(ensemble, level);
  s.ci_width = ci.width();
  s.ci_lo = std::move(ci.lo);
  s.ci_hi = std::move(ci.hi);
  if (f) s.sparsity_hist = sparsity_histogram(ensemble, *f, tol);
  return s;
}

}  // namespace proxis
