#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "censornet/model.hpp"
#include "censornet/prober.hpp"
#include "censornet/transport.hpp"

namespace censornet {

struct CircumventionResult {
    UrlRecord record;
    PageOutcome direct_outcome = PageOutcome::Unreachable;
    PageOutcome alt_outcome = PageOutcome::Unreachable;
    bool success = false;  // alt_outcome == Content

    bool operator==(const CircumventionResult&) const = default;
};

struct SuccessRow {
    StatusClass stratum = StatusClass::blank0();
    std::string path_label;
    std::size_t success_pct = 0;
    std::size_t numerator = 0;
    std::size_t denominator = 0;

    bool operator==(const SuccessRow&) const = default;
};

struct SuccessTable {
    std::string path_label;
    std::vector<SuccessRow> rows;  // ordered 302, 301, 200, blank, others

    /// Throws InputError if a row has numerator > denominator, a zero
    /// denominator, or a percentage inconsistent with half-up rounding.
    void validate() const;
    const SuccessRow* row(const StatusClass& stratum) const;

    bool operator==(const SuccessTable&) const = default;
};

/// round_half_up(100 * numerator / denominator), computed exactly.
std::size_t success_percentage(std::size_t numerator, std::size_t denominator);

/// Content when a 2xx body arrives without a fingerprint match, BlockPage when
/// the body matches, Unreachable otherwise.
PageOutcome classify_page(const FetchResponse& response, const FingerprintSet& fp);

/// GETs the URL over both paths (following redirects) and records the outcome
/// of each. Success is judged on the alternate path alone.
CircumventionResult dual_path_fetch(const UrlRecord& record, TransportPort& direct, TransportPort& alt,
                                    const FingerprintSet& fp, const ProbePolicy& policy = {});

/// dual_path_fetch over many records, at most policy.max_parallel at a time;
/// results in input order.
std::vector<CircumventionResult> run_circumvention(std::span<const UrlRecord> records, TransportPort& direct,
                                                   TransportPort& alt, const FingerprintSet& fp,
                                                   const ProbePolicy& policy);

/// One row per stratum present among the results. Throws InputError when a
/// result's record has no stratum.
SuccessTable success_by_stratum(std::span<const CircumventionResult> results,
                                const std::map<UrlRecord, StatusClass>& strata, const std::string& path_label);

}  // namespace censornet
