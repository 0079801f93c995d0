#include "censornet/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

namespace censornet::sampling {

void SamplingParams::validate() const {
    if (!(z > 0.0)) throw InputError("z must be positive");
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("p must lie in [0, 1]");
    if (e == 0.0) throw DomainError("margin of error e must be non-zero");
    if (!(e > 0.0 && e <= 1.0)) throw InputError("margin of error e must lie in (0, 1]");
    if (population < 1) throw InputError("population must be at least 1");
}

std::size_t round_half_up(double x) {
    if (!(x >= 0.0)) throw InputError("round_half_up expects a non-negative value");
    return static_cast<std::size_t>(std::floor(x + 0.5));
}

std::size_t round_half_up_ratio(std::uint64_t numerator, std::uint64_t denominator) {
    if (denominator == 0) throw DomainError("zero denominator");
    return static_cast<std::size_t>((2 * numerator + denominator) / (2 * denominator));
}

double initial_sample_size(double z, double p, double e) {
    SamplingParams{z, p, e, 1}.validate();
    return z * z * p * (1.0 - p) / (e * e);
}

double fpc_sample_size(std::size_t n0, std::size_t population) {
    if (population < 1) throw InputError("population must be at least 1");
    auto n0d = static_cast<double>(n0);
    auto nd = static_cast<double>(population);
    return n0d * nd / (n0d + (nd - 1.0));
}

SampleSizeResult compute_sample_size(const SamplingParams& params) {
    params.validate();
    SampleSizeResult r;
    r.n0_real = initial_sample_size(params.z, params.p, params.e);
    r.n0 = round_half_up(r.n0_real);
    r.n_real = fpc_sample_size(r.n0, params.population);
    r.n = std::min(round_half_up(r.n_real), params.population);
    return r;
}

std::vector<StratumAllocation> allocate_strata(std::size_t n, std::span<const StratumSize> strata) {
    std::uint64_t total = 0;
    for (const auto& s : strata) total += s.size;
    if (total == 0) throw InputError("allocate_strata: all strata are empty");
    if (n > total) throw InputError("allocate_strata: sample size exceeds population");
    std::vector<StratumAllocation> out;
    out.reserve(strata.size());
    for (const auto& s : strata) {
        out.push_back({s.label, round_half_up_ratio(static_cast<std::uint64_t>(n) * s.size, total)});
    }
    return out;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound == 0) throw InputError("uniform_below: empty range");
    // largest multiple of bound representable; reject the tail
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

std::vector<std::size_t> draw_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k > n) throw InputError("draw_indices: k exceeds population");
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

std::uint64_t stratum_seed(std::uint64_t seed, const StatusClass& label) {
    std::uint64_t z = seed ^ (static_cast<std::uint64_t>(label.code()) * 0x9e3779b97f4a7c15ULL);
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<StratumPlan> plan_strata(std::span<const ProbeResult> results, std::size_t n, std::uint64_t seed) {
    std::map<StatusClass, std::vector<UrlRecord>> groups;
    for (const auto& r : results) groups[r.status_class].push_back(r.record);

    std::vector<StratumSize> sizes;
    for (const auto& [label, members] : groups) sizes.push_back({label, members.size()});
    std::stable_sort(sizes.begin(), sizes.end(),
                     [](const StratumSize& a, const StratumSize& b) { return a.size > b.size; });

    std::vector<StratumPlan> plans;
    for (const auto& alloc : allocate_strata(n, sizes)) {
        StratumPlan plan;
        plan.label = alloc.label;
        plan.members = groups.at(alloc.label);
        plan.population_size = plan.members.size();
        plan.allocation = alloc.allocation;
        plan.sample = draw_sample<UrlRecord>(plan.members, alloc.allocation, stratum_seed(seed, alloc.label));
        plan.validate();
        plans.push_back(std::move(plan));
    }
    return plans;
}

}  // namespace censornet::sampling
