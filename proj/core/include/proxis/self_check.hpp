#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace proxis {

struct CheckResult {
  std::string name;
  double value = 0.0;  // worst observed error
  double tolerance = 0.0;
  bool pass = false;
};

/// <Ax, y> against <x, A^T y> for every operator kind, `pairs` random pairs
/// each, relative error at most 1e-10.
std::vector<CheckResult> adjoint_suite(std::uint64_t seed = 1, int pairs = 100);

/// Closed-form prox checks plus the 1D TV prox against a long plain ADMM run
/// on `inputs` random length-20 signals.
std::vector<CheckResult> prox_suite(std::uint64_t seed = 1, int inputs = 100);

bool all_pass(const std::vector<CheckResult>& results) noexcept;

}  // namespace proxis
