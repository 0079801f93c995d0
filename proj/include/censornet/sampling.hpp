#pragma once

// Sample-size determination for a known population (Cochran's estimate with
// finite population correction), proportional stratum allocation, and seeded
// draws without replacement.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "censornet/errors.hpp"
#include "censornet/model.hpp"

namespace censornet::sampling {

// Two-sided critical values for the usual confidence levels.
inline constexpr double kZ90 = 1.645;
inline constexpr double kZ95 = 1.96;
inline constexpr double kZ99 = 2.576;

struct SamplingParams {
    double z = kZ95;
    double p = 0.5;
    double e = 0.05;
    std::size_t population = 1;

    void validate() const;
    bool operator==(const SamplingParams&) const = default;
};

struct SampleSizeResult {
    double n0_real = 0.0;
    std::size_t n0 = 0;
    double n_real = 0.0;
    std::size_t n = 0;

    bool operator==(const SampleSizeResult&) const = default;
};

/// Rounds to the nearest integer with ties going up. x must be non-negative.
std::size_t round_half_up(double x);

/// Exact half-up rounding of numerator/denominator, no floating point.
std::size_t round_half_up_ratio(std::uint64_t numerator, std::uint64_t denominator);

/// z^2 * p * (1 - p) / e^2. Throws DomainError for e == 0, InputError for
/// other parameter violations.
double initial_sample_size(double z, double p, double e);

/// n0 * N / (n0 + (N - 1)).
double fpc_sample_size(std::size_t n0, std::size_t population);

/// Rounds n0, then the corrected n, independently (half-up).
SampleSizeResult compute_sample_size(const SamplingParams& params);

struct StratumSize {
    StatusClass label;
    std::size_t size = 0;
};

struct StratumAllocation {
    StatusClass label;
    std::size_t allocation = 0;

    bool operator==(const StratumAllocation&) const = default;
};

/// round_half_up(n * size_h / N) per stratum, input order preserved. The
/// per-stratum rounding is not redistributed, so the sum may drift from n by
/// at most the number of strata. Throws InputError if every size is zero or
/// n exceeds the total population.
std::vector<StratumAllocation> allocate_strata(std::size_t n, std::span<const StratumSize> strata);

/// Uniform integer in [0, bound) from a 64-bit engine, by rejection so that the
/// stream is identical across standard library implementations.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// Indices of k distinct positions out of n, in draw order. The generator is
/// std::mt19937_64 seeded with `seed`, driving a partial Fisher-Yates shuffle
/// over uniform_below; the output is a pure function of (n, k, seed).
std::vector<std::size_t> draw_indices(std::size_t n, std::size_t k, std::uint64_t seed);

/// k members chosen uniformly without replacement (by position).
template <class T>
std::vector<T> draw_sample(std::span<const T> members, std::size_t k, std::uint64_t seed) {
    if (k > members.size()) {
        throw InputError("cannot draw " + std::to_string(k) + " of " + std::to_string(members.size()) + " members");
    }
    std::vector<T> out;
    out.reserve(k);
    for (std::size_t i : draw_indices(members.size(), k, seed)) out.push_back(members[i]);
    return out;
}

/// Per-stratum seed derived from the run seed and the stratum key (splitmix64).
std::uint64_t stratum_seed(std::uint64_t seed, const StatusClass& label);

/// Groups probe results into strata ordered by descending population (ties by
/// class order), allocates n proportionally and draws each stratum's sample.
std::vector<StratumPlan> plan_strata(std::span<const ProbeResult> results, std::size_t n, std::uint64_t seed);

}  // namespace censornet::sampling
