#include "censornet/circumvention.hpp"

#include <optional>

#include "censornet/errors.hpp"
#include "censornet/sampling.hpp"

namespace censornet {

std::size_t success_percentage(std::size_t numerator, std::size_t denominator) {
    if (denominator == 0) throw InputError("success percentage over an empty stratum");
    if (numerator > denominator) throw InputError("success numerator exceeds denominator");
    return sampling::round_half_up_ratio(100ULL * numerator, denominator);
}

void SuccessTable::validate() const {
    for (const auto& r : rows) {
        if (r.denominator == 0 || r.numerator > r.denominator) {
            throw InputError("success row for stratum " + r.stratum.key() + " has invalid counts");
        }
        if (r.success_pct != success_percentage(r.numerator, r.denominator)) {
            throw InputError("success row for stratum " + r.stratum.key() + " has an inconsistent percentage");
        }
    }
}

const SuccessRow* SuccessTable::row(const StatusClass& stratum) const {
    for (const auto& r : rows) {
        if (r.stratum == stratum) return &r;
    }
    return nullptr;
}

PageOutcome classify_page(const FetchResponse& response, const FingerprintSet& fp) {
    if (!response.status) return PageOutcome::Unreachable;
    if (detect_block_page(response.body, fp)) return PageOutcome::BlockPage;
    if (*response.status >= 200 && *response.status < 300) return PageOutcome::Content;
    return PageOutcome::Unreachable;
}

CircumventionResult dual_path_fetch(const UrlRecord& record, TransportPort& direct, TransportPort& alt,
                                    const FingerprintSet& fp, const ProbePolicy& policy) {
    FetchRequest req;
    req.url = record.url;
    req.method = HttpMethod::Get;
    req.follow_redirects = true;
    req.connect_timeout = policy.connect_timeout;
    req.total_timeout = policy.total_timeout;
    req.user_agent = policy.user_agent;

    CircumventionResult r;
    r.record = record;
    r.direct_outcome = classify_page(direct.fetch(req), fp);
    r.alt_outcome = classify_page(alt.fetch(req), fp);
    r.success = r.alt_outcome == PageOutcome::Content;
    return r;
}

std::vector<CircumventionResult> run_circumvention(std::span<const UrlRecord> records, TransportPort& direct,
                                                   TransportPort& alt, const FingerprintSet& fp,
                                                   const ProbePolicy& policy) {
    policy.validate();
    std::vector<std::optional<CircumventionResult>> slots(records.size());
    parallel_for(records.size(), policy.max_parallel,
                 [&](std::size_t i) { slots[i] = dual_path_fetch(records[i], direct, alt, fp, policy); });
    std::vector<CircumventionResult> out;
    out.reserve(records.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

SuccessTable success_by_stratum(std::span<const CircumventionResult> results,
                                const std::map<UrlRecord, StatusClass>& strata, const std::string& path_label) {
    std::map<StatusClass, std::pair<std::size_t, std::size_t>> tally;
    for (const auto& r : results) {
        auto it = strata.find(r.record);
        if (it == strata.end()) throw InputError("no stratum recorded for " + r.record.url);
        auto& [num, den] = tally[it->second];
        ++den;
        if (r.success) ++num;
    }
    SuccessTable table;
    table.path_label = path_label;
    for (const auto& [stratum, counts] : tally) {
        table.rows.push_back(
            {stratum, path_label, success_percentage(counts.first, counts.second), counts.first, counts.second});
    }
    return table;
}

}  // namespace censornet
