#pragma once

#include <map>
#include <vector>

#include "proxis/faces.hpp"
#include "proxis/linops.hpp"
#include "proxis/regularizer.hpp"

namespace proxis {

// Ensembles are stored one sample per row.

/// Per-column quantile with linear interpolation between order statistics:
/// h = (N - 1) q, value = x_(floor h) + (h - floor h)(x_(floor h + 1) - x_(floor h)).
Vector componentwise_quantile(const Matrix& ensemble, double q);
Vector componentwise_median(const Matrix& ensemble);
Vector componentwise_mean(const Matrix& ensemble);

struct CredibleIntervals {
  Vector lo;
  Vector hi;
  Vector width() const { return hi - lo; }
};

/// Equal-tailed interval between the (1 - level)/2 and (1 + level)/2 quantiles.
CredibleIntervals credible_intervals(const Matrix& ensemble, double level = 0.95);
Vector credible_interval_width(const Matrix& ensemble, double level = 0.95);

/// Counts of face_dimension(f, row, tol) over the rows.
std::map<Index, Index> sparsity_histogram(const Matrix& ensemble, const Regularizer& f,
                                          double tol = kDefaultSnapTolerance);

/// Biased autocorrelation estimates for lags 0..max_lag. A chain with zero
/// variance has autocorrelation 1 at every lag.
Vector chain_autocorrelation(const std::vector<double>& chain, Index max_lag);

struct EnsembleSummary {
  Vector median;
  Vector mean;
  Vector ci_lo;
  Vector ci_hi;
  Vector ci_width;
  std::map<Index, Index> sparsity_hist;
  Index n_samples = 0;
  double level = 0.95;
};

EnsembleSummary summarize(const Matrix& ensemble, double level = 0.95,
                          const Regularizer* f = nullptr, double tol = kDefaultSnapTolerance);

}  // namespace proxis
