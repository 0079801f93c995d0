#pragma once

// Shared vocabulary for the measurement pipeline: audited URLs, the status
// taxonomy used by the census, probe outcomes, and sampling strata.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace censornet {

/// IPv4 address held in host byte order.
class Ipv4 {
public:
    constexpr Ipv4() = default;
    constexpr explicit Ipv4(std::uint32_t value) : value_(value) {}

    /// Parses dotted-quad notation; throws InputError on anything else.
    static Ipv4 parse(std::string_view text);
    static std::optional<Ipv4> try_parse(std::string_view text);

    constexpr std::uint32_t value() const { return value_; }
    std::string to_string() const;

    constexpr auto operator<=>(const Ipv4&) const = default;

private:
    std::uint32_t value_ = 0;
};

/// True for a syntactically valid DNS hostname (LDH labels, 1..63 chars each,
/// at most 253 overall). Case-insensitive; a single trailing dot is allowed.
bool is_valid_hostname(std::string_view host);

enum class Scheme { Http, Https };

std::string_view to_string(Scheme scheme);

/// One audited URL. Construct through parse(); the domain is always the
/// lowercased hostname of url.
struct UrlRecord {
    std::string url;
    std::string domain;
    Scheme scheme = Scheme::Http;
    std::optional<std::uint16_t> port;
    std::string path = "/";

    /// Throws InputError unless text is an absolute http(s) URL with a valid host.
    static UrlRecord parse(std::string_view text);
    static std::optional<UrlRecord> try_parse(std::string_view text, std::string* why = nullptr);

    bool operator==(const UrlRecord& other) const { return url == other.url; }
    auto operator<=>(const UrlRecord& other) const { return url <=> other.url; }
};

/// The census taxonomy: the three dominant HTTP codes, "no status obtained",
/// and a catch-all carrying any other code.
class StatusClass {
public:
    enum class Kind : std::uint8_t { Ok200, Moved301, Found302, Blank0, Other };

    static constexpr StatusClass ok200() { return StatusClass(Kind::Ok200, 200); }
    static constexpr StatusClass moved301() { return StatusClass(Kind::Moved301, 301); }
    static constexpr StatusClass found302() { return StatusClass(Kind::Found302, 302); }
    static constexpr StatusClass blank0() { return StatusClass(Kind::Blank0, 0); }
    /// Code must not be one of 0/200/301/302; use classify_status for raw input.
    static StatusClass other(int code);

    constexpr Kind kind() const { return kind_; }
    /// 0 for Blank0, otherwise the HTTP code.
    constexpr int code() const { return code_; }

    /// Short key used in JSON/CSV: "200", "301", "302", "0", or the other code.
    std::string key() const;
    /// Row label in the census table ("OK", "Moved Permanently", ...).
    std::string description() const;
    /// Parses a key() string back.
    static StatusClass from_key(std::string_view key);

    // Orders Found302 < Moved301 < Ok200 < Blank0 < Other(code ascending);
    // this is the row order used for the circumvention tables.
    std::strong_ordering operator<=>(const StatusClass& other) const;
    constexpr bool operator==(const StatusClass&) const = default;

private:
    constexpr StatusClass(Kind kind, int code) : kind_(kind), code_(code) {}

    Kind kind_;
    int code_;
};

/// Maps a raw HTTP status (absent when none was obtained) onto the taxonomy.
/// Throws InputError for a present status outside [100, 599].
StatusClass classify_status(std::optional<int> raw_status);

inline constexpr std::size_t kBodyExcerptLimit = 64 * 1024;

struct ProbeResult {
    UrlRecord record;
    StatusClass status_class = StatusClass::blank0();
    std::optional<int> raw_status;
    double response_time = 0.0;  // seconds
    std::optional<std::string> body_excerpt;
    std::optional<std::string> error_note;

    /// Builds a result, deriving the class from raw_status and truncating the
    /// excerpt to kBodyExcerptLimit. Throws InputError on a negative time.
    static ProbeResult make(UrlRecord record, std::optional<int> raw_status, double response_time,
                            std::optional<std::string> body_excerpt = std::nullopt,
                            std::optional<std::string> error_note = std::nullopt);

    bool operator==(const ProbeResult&) const = default;
};

/// Per-class counts. total() is the sum of the counts by construction.
class CensusTable {
public:
    CensusTable() = default;

    void add(const StatusClass& cls, std::size_t n = 1);
    std::size_t count(const StatusClass& cls) const;
    std::size_t total() const { return total_; }
    const std::map<StatusClass, std::size_t>& counts() const { return counts_; }

    /// Rebuilds a table from stored counts; throws InputError if total
    /// disagrees with the sum.
    static CensusTable from_counts(const std::map<StatusClass, std::size_t>& counts, std::size_t total);

    bool operator==(const CensusTable&) const = default;

private:
    std::map<StatusClass, std::size_t> counts_;
    std::size_t total_ = 0;
};

CensusTable build_census(std::span<const ProbeResult> results);

/// Where a page fetch ended up: the block page, real content, or nowhere.
enum class PageOutcome { BlockPage, Content, Unreachable };

std::string_view to_string(PageOutcome outcome);
PageOutcome parse_page_outcome(std::string_view text);

struct StratumPlan {
    StatusClass label = StatusClass::blank0();
    std::size_t population_size = 0;
    std::size_t allocation = 0;
    std::vector<UrlRecord> members;
    std::vector<UrlRecord> sample;

    /// Throws InputError if allocation > population, sample size differs from
    /// allocation, or sample holds duplicates / non-members.
    void validate() const;

    bool operator==(const StratumPlan&) const = default;
};

}  // namespace censornet
