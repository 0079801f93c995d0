#pragma once

// Bulk HTTP status census and block-page fingerprinting.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "censornet/model.hpp"
#include "censornet/transport.hpp"

namespace censornet {

struct ProbePolicy {
    double connect_timeout = 10.0;
    double total_timeout = 30.0;
    std::size_t max_parallel = 8;
    bool follow_redirects = false;
    std::vector<HttpMethod> method_chain{HttpMethod::Head, HttpMethod::Get};
    std::string user_agent = "censornet/1.0";

    /// Throws InputError if a timeout is non-positive, connect > total,
    /// max_parallel == 0 or the method chain is empty.
    void validate() const;
};

enum class MatchScope { Body, Title, Both };

std::string_view to_string(MatchScope scope);
MatchScope parse_match_scope(std::string_view text);

struct FingerprintSet {
    std::vector<std::string> patterns;
    MatchScope scope = MatchScope::Body;

    /// One pattern per line; '#' starts a comment line; surrounding
    /// whitespace is trimmed; blank lines are skipped. Throws InputError
    /// when no pattern remains.
    static FingerprintSet parse(std::string_view text, MatchScope scope = MatchScope::Body);
    static FingerprintSet load(const std::filesystem::path& path, MatchScope scope = MatchScope::Body);
    static FingerprintSet default_set();
};

/// True iff some pattern occurs (ASCII case-insensitively) within the scoped
/// part of body. Bodies that are not valid UTF-8 never match.
bool detect_block_page(std::string_view body, const FingerprintSet& fp);

/// Contents of the first <title> element, or empty when there is none.
std::string_view extract_title(std::string_view html);

bool is_valid_utf8(std::string_view bytes);

/// Probes one URL along the policy's method chain without following
/// redirects. A method-not-allowed reply (405/501) or a non-DNS transport
/// failure moves on to the next method; otherwise the first status wins.
/// No status at all yields a Blank0 result whose error_note names the
/// failure. Throws InputError when record.url is malformed.
ProbeResult probe_url(const UrlRecord& record, const ProbePolicy& policy, TransportPort& transport);

struct CensusRun {
    std::vector<ProbeResult> results;
    CensusTable census;
};

/// Probes every record with at most policy.max_parallel requests in flight.
/// Results come back in input order. Throws InputError on an empty list.
CensusRun run_census(std::span<const UrlRecord> records, const ProbePolicy& policy, TransportPort& transport);

/// Runs fn(i) for i in [0, count) on up to max_parallel worker threads.
/// The first exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t max_parallel, const std::function<void(std::size_t)>& fn);

}  // namespace censornet
