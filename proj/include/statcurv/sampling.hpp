#pragma once

// Deterministic sampling: Halton points over a shrunk domain box, seeded RNG
// streams split per work item, and a small parallel map whose results do not
// depend on the thread count.

#include "statcurv/structure.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace statcurv {

/// Fraction of each axis kept when sampling (centred).
inline constexpr double kSampleBoxFraction = 0.9;

/// Radical inverse of `index` in `base`.
double radical_inverse(std::uint64_t index, int base);

/// `count` Halton points (indices 1..count) over the domain box shrunk to
/// kSampleBoxFraction of its width on every axis.
std::vector<std::vector<double>> halton_points(const std::vector<Interval>& domain, std::size_t count);

std::uint64_t splitmix64(std::uint64_t x);

/// Independent stream for work item `stream` under master `seed`.
std::mt19937_64 rng_stream(std::uint64_t seed, std::uint64_t stream);

/// Uniform double in [0, 1) with 53 random bits; identical on every platform.
double uniform01(std::mt19937_64& rng);

/// Random direction with unit g-norm.
Vector random_unit_vector(std::mt19937_64& rng, const Matrix& g);

/// Worker count: STATCURV_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

/// Runs fn(i) for i in [0, count) on up to worker_count() threads and returns
/// results in index order.
template <class Fn>
auto parallel_map(std::size_t count, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))>;

}  // namespace statcurv

#include "statcurv/detail/parallel.hpp"
