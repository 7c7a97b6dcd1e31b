#pragma once

#include <cstdint>
#include <random>

namespace noon::rng {

/// SplitMix64 mixing step; maps any 64-bit value to a well-scrambled one.
std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic per-stream generator: derives an independent mt19937_64
/// from a base seed and a stream index, so sweep steps can be sampled in
/// any order (or in parallel) without changing the result.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

/// Draws a Poisson variate with the given mean.
///
/// Hand-rolled (inversion-by-products below mean 30, Hormann's PTRS
/// transformed rejection above) so that a fixed seed reproduces the same
/// counts on every platform; std::poisson_distribution's algorithm is
/// implementation-defined.
std::int64_t sample_poisson(double mean, std::mt19937_64& gen);

/// FNV-1a 64-bit hash, used for input-file provenance digests.
std::uint64_t fnv1a64(const void* data, std::size_t size);

}  // namespace noon::rng
