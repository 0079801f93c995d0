#pragma once

// URL-list ingestion and table emission in text, CSV and JSON. Every JSON
// emitter has a matching parser, and parse(emit(x)) == x.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "censornet/circumvention.hpp"
#include "censornet/dns_audit.hpp"
#include "censornet/model.hpp"
#include "censornet/sampling.hpp"
#include "censornet/simnet.hpp"

namespace censornet::report {

enum class Format { Text, Csv, Json };

std::string_view to_string(Format format);
/// "text", "csv" or "json"; throws InputError otherwise.
Format parse_format(std::string_view text);

struct RejectedLine {
    std::size_t line = 0;  // 1-based
    std::string text;
    std::string reason;

    bool operator==(const RejectedLine&) const = default;
};

struct UrlList {
    std::vector<UrlRecord> records;
    std::vector<RejectedLine> rejects;
};

/// Reads one URL per line, or the numbered multi-column layout
/// ("1  http://a/  409  http://b/  0.000361"). Integer tokens separate
/// entries and are dropped, as are decimal tokens (response times). An entry
/// wrapped in <...> is unwrapped. Blank lines and lines starting with '#' are
/// skipped. Never throws on content.
UrlList parse_url_list(std::string_view text);

struct DomainList {
    std::vector<std::string> domains;
    std::vector<RejectedLine> rejects;
};

/// Bare hostnames or URLs, any number per line, in the same layouts as
/// parse_url_list. URLs contribute their host. Domains are lowercased and
/// kept in input order, duplicates included.
DomainList parse_domain_list(std::string_view text);

/// "1\t<url>" per record; parse_url_list inverts it.
std::string emit_url_list(std::span<const UrlRecord> records);

/// Quotes a CSV field when it contains a comma, quote, CR or LF.
std::string csv_field(std::string_view value);

std::string emit_census(const CensusTable& census, Format format);
CensusTable parse_census_json(std::string_view text);

struct SamplePlan {
    sampling::SamplingParams params;
    sampling::SampleSizeResult size;
    std::uint64_t seed = 0;
    std::vector<StratumPlan> strata;

    bool operator==(const SamplePlan&) const = default;
};

/// "261 * 449 / 815 = 143.79 = 144" for one stratum.
std::string allocation_calculation(std::size_t n, std::size_t stratum_size, std::size_t population,
                                   std::size_t allocation);

std::string emit_sample_plan(const SamplePlan& plan, Format format);
SamplePlan parse_sample_plan_json(std::string_view text);

/// One table per path; several tables are laid side by side in text mode.
std::string emit_success_tables(std::span<const SuccessTable> tables, Format format);
std::vector<SuccessTable> parse_success_tables_json(std::string_view text);

struct TriageRow {
    std::string domain;
    std::optional<TriageStatus> status;  // absent when the lookup failed
    std::string error;

    bool operator==(const TriageRow&) const = default;
};

struct TriageCounts {
    std::size_t purchasable = 0;
    std::size_t no_a_record = 0;
    std::size_t resolvable = 0;
    std::size_t lookup_failed = 0;

    std::size_t total() const { return purchasable + no_a_record + resolvable + lookup_failed; }
    bool operator==(const TriageCounts&) const = default;
};

TriageCounts count_triage(std::span<const TriageRow> rows);
/// The summary table alone, for archives that keep only the counts.
std::string emit_triage_summary(const TriageCounts& counts, Format format);
std::string emit_triage(std::span<const TriageRow> rows, Format format);
std::vector<TriageRow> parse_triage_json(std::string_view text);

struct VerdictRow {
    DnsObservation in_scope;
    DnsObservation reference;
    DnsVerdict verdict = DnsVerdict::consistent();

    bool operator==(const VerdictRow&) const = default;
};

std::string emit_verdicts(std::span<const VerdictRow> rows, Format format);
std::vector<VerdictRow> parse_verdicts_json(std::string_view text);

struct TraceRow {
    std::string domain;
    std::string path;
    PageOutcome outcome = PageOutcome::Unreachable;
    DnsAnswer answer;
    std::optional<int> status;
    std::vector<sim::SimEvent> events;

    bool operator==(const TraceRow&) const = default;
};

TraceRow make_trace_row(std::string domain, std::string path, const sim::EndToEnd& result);
std::string emit_traces(std::span<const TraceRow> rows, Format format);
std::vector<TraceRow> parse_traces_json(std::string_view text);

}  // namespace censornet::report
