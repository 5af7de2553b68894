#pragma once

#include <cstdint>
#include <random>

namespace symop {

/// Tolerance ladder shared by every module.
///
/// `check` is the relative tolerance for self-adjointness, projection and
/// commutation tests (relative to the operator norm of the argument).
/// `structural` bounds exact algebraic identities, `fit` bounds least-squares
/// residuals, `oracle` bounds sampled quantities such as isometry defects.
struct Tolerances {
  double check = 1e-10;
  double structural = 1e-12;
  double fit = 1e-9;
  double oracle = 1e-8;
};

/// Sampling options for the randomized oracles.
struct SamplingOptions {
  std::uint64_t seed = 20240601;
  int samples = 64;
};

using Rng = std::mt19937_64;

/// Deterministic generator for shard `shard` of a computation seeded by `seed`.
inline Rng make_rng(std::uint64_t seed, std::uint64_t shard = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(shard), static_cast<std::uint32_t>(shard >> 32)};
  return Rng(seq);
}

}  // namespace symop
