#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Core>

namespace proxis {

using Rng = std::mt19937_64;

// Seed derivation. Every random stream in the library is a pure function of a
// master seed plus a fixed label and/or counter, so results never depend on
// scheduling order.
std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t hash_label(std::string_view label) noexcept;

/// Seed of the `counter`-th child stream of `master`. Distinct counters give
/// distinct seeds.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t counter) noexcept;

/// Seed of the stream named `label` (and optional index) under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t index = 0) noexcept;

Rng make_rng(std::uint64_t seed);

Eigen::VectorXd standard_normal(Rng& rng, Eigen::Index n);

namespace seed_labels {
inline constexpr std::string_view perturb_data = "perturb-b";
inline constexpr std::string_view perturb_prior = "perturb-c";
inline constexpr std::string_view gibbs_hyper = "gibbs-hyper";
inline constexpr std::string_view noise_sim = "noise-sim";
inline constexpr std::string_view rwm_chain = "rwm-chain";
}  // namespace seed_labels

}  // namespace proxis
