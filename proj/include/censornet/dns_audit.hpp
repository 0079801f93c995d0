#pragma once

// Cross-vantage A-record auditing and triage of domains that never returned
// an HTTP status.

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "censornet/model.hpp"

namespace censornet {

enum class Rcode { NoError, NxDomain, ServFail, Timeout };

std::string_view to_string(Rcode rcode);
Rcode parse_rcode(std::string_view text);

struct DnsAnswer {
    Rcode rcode = Rcode::NoError;
    std::set<Ipv4> answers;

    bool operator==(const DnsAnswer&) const = default;
};

/// What one resolver returned for one domain from one vantage point.
/// Non-NoError observations never carry answers.
struct DnsObservation {
    std::string domain;
    std::string vantage;
    std::string resolver;
    std::set<Ipv4> answers;
    Rcode rcode = Rcode::NoError;

    static DnsObservation make(std::string domain, std::string vantage, std::string resolver, DnsAnswer answer);
    bool operator==(const DnsObservation&) const = default;
};

class DnsVerdict {
public:
    enum class Kind { Consistent, Tampered, DivergentUnknown, UnresolvableEverywhere };

    static DnsVerdict consistent() { return DnsVerdict(Kind::Consistent, {}); }
    /// Throws InputError on an empty injected set.
    static DnsVerdict tampered(std::set<Ipv4> injected);
    static DnsVerdict divergent_unknown() { return DnsVerdict(Kind::DivergentUnknown, {}); }
    static DnsVerdict unresolvable_everywhere() { return DnsVerdict(Kind::UnresolvableEverywhere, {}); }

    Kind kind() const { return kind_; }
    const std::set<Ipv4>& injected() const { return injected_; }

    bool operator==(const DnsVerdict&) const = default;

private:
    DnsVerdict(Kind kind, std::set<Ipv4> injected) : kind_(kind), injected_(std::move(injected)) {}

    Kind kind_;
    std::set<Ipv4> injected_;
};

std::string_view to_string(DnsVerdict::Kind kind);

enum class TriageStatus { PurchasableDomain, NoARecord, Resolvable };

std::string_view to_string(TriageStatus status);
TriageStatus parse_triage_status(std::string_view text);

/// Abstract A-record query. `resolver` is an address for live resolvers and
/// is ignored by implementations that have a single source of truth.
class DnsPort {
public:
    virtual ~DnsPort() = default;
    virtual DnsAnswer query_a(const std::string& domain, const std::string& resolver) = 0;
};

enum class Availability { Available, Registered };

/// Registrar-style availability check. Throws LookupFailedError when the
/// source cannot answer.
class AvailabilityPort {
public:
    virtual ~AvailabilityPort() = default;
    virtual Availability check(const std::string& domain) = 0;
};

/// Throws InputError for a malformed hostname; DNS-level failures are
/// reported through the observation's rcode.
DnsObservation resolve_a(const std::string& domain, const std::string& vantage, const std::string& resolver,
                         DnsPort& dns);

/// Classifies the in-scope observation against a reference vantage:
///   equal answer sets (non-empty, or both NoError-empty) -> Consistent
///   in-scope answers hit a known block IP, reference differs -> Tampered
///   neither side NoError                                     -> UnresolvableEverywhere
///   anything else                                            -> DivergentUnknown
/// Throws InputError if the observations are for different domains.
DnsVerdict compare_vantages(const DnsObservation& in_scope, const DnsObservation& reference,
                            const std::set<Ipv4>& block_ips);

/// Available for registration -> PurchasableDomain; registered but without
/// an A answer -> NoARecord; otherwise Resolvable. LookupFailedError from the
/// availability port propagates.
TriageStatus triage_blank(const std::string& domain, AvailabilityPort& availability, DnsPort& dns,
                          const std::string& resolver = {});

/// Fixture-backed registry: {domain: {"available": bool, "a_records": [ip]}}.
/// Extra keys (e.g. "mx_records") are accepted and ignored for A lookups.
/// Serves both ports; unknown domains fail availability lookups and resolve
/// to NXDOMAIN.
class FixtureRegistry final : public DnsPort, public AvailabilityPort {
public:
    struct Entry {
        bool available = false;
        std::set<Ipv4> a_records;
    };

    FixtureRegistry() = default;
    explicit FixtureRegistry(std::map<std::string, Entry> entries);

    static FixtureRegistry parse(std::string_view json_text);
    static FixtureRegistry load(const std::filesystem::path& path);

    DnsAnswer query_a(const std::string& domain, const std::string& resolver) override;
    Availability check(const std::string& domain) override;

    const std::map<std::string, Entry>& entries() const { return entries_; }

private:
    std::map<std::string, Entry> entries_;
};

}  // namespace censornet
