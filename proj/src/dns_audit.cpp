#include "censornet/dns_audit.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "censornet/errors.hpp"

namespace censornet {

std::string_view to_string(Rcode rcode) {
    switch (rcode) {
        case Rcode::NoError: return "NOERROR";
        case Rcode::NxDomain: return "NXDOMAIN";
        case Rcode::ServFail: return "SERVFAIL";
        case Rcode::Timeout: return "TIMEOUT";
    }
    return "SERVFAIL";
}

Rcode parse_rcode(std::string_view text) {
    for (auto r : {Rcode::NoError, Rcode::NxDomain, Rcode::ServFail, Rcode::Timeout}) {
        if (to_string(r) == text) return r;
    }
    throw InputError("unknown rcode '" + std::string(text) + "'");
}

std::string_view to_string(DnsVerdict::Kind kind) {
    switch (kind) {
        case DnsVerdict::Kind::Consistent: return "Consistent";
        case DnsVerdict::Kind::Tampered: return "Tampered";
        case DnsVerdict::Kind::DivergentUnknown: return "DivergentUnknown";
        case DnsVerdict::Kind::UnresolvableEverywhere: return "UnresolvableEverywhere";
    }
    return "DivergentUnknown";
}

std::string_view to_string(TriageStatus status) {
    switch (status) {
        case TriageStatus::PurchasableDomain: return "PurchasableDomain";
        case TriageStatus::NoARecord: return "NoARecord";
        case TriageStatus::Resolvable: return "Resolvable";
    }
    return "Resolvable";
}

TriageStatus parse_triage_status(std::string_view text) {
    for (auto s : {TriageStatus::PurchasableDomain, TriageStatus::NoARecord, TriageStatus::Resolvable}) {
        if (to_string(s) == text) return s;
    }
    throw InputError("unknown triage status '" + std::string(text) + "'");
}

DnsVerdict DnsVerdict::tampered(std::set<Ipv4> injected) {
    if (injected.empty()) throw InputError("a Tampered verdict needs at least one injected address");
    return DnsVerdict(Kind::Tampered, std::move(injected));
}

DnsObservation DnsObservation::make(std::string domain, std::string vantage, std::string resolver, DnsAnswer answer) {
    DnsObservation o;
    o.domain = std::move(domain);
    o.vantage = std::move(vantage);
    o.resolver = std::move(resolver);
    o.rcode = answer.rcode;
    if (answer.rcode == Rcode::NoError) o.answers = std::move(answer.answers);
    return o;
}

namespace {

std::string lowered(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    if (!out.empty() && out.back() == '.') out.pop_back();
    return out;
}

}  // namespace

DnsObservation resolve_a(const std::string& domain, const std::string& vantage, const std::string& resolver,
                         DnsPort& dns) {
    if (!is_valid_hostname(domain)) throw InputError("malformed hostname '" + domain + "'");
    std::string name = lowered(domain);
    return DnsObservation::make(name, vantage, resolver, dns.query_a(name, resolver));
}

DnsVerdict compare_vantages(const DnsObservation& in_scope, const DnsObservation& reference,
                            const std::set<Ipv4>& block_ips) {
    if (lowered(in_scope.domain) != lowered(reference.domain)) {
        throw InputError("compare_vantages: observations are for different domains ('" + in_scope.domain +
                         "' vs '" + reference.domain + "')");
    }
    const bool in_ok = in_scope.rcode == Rcode::NoError;
    const bool ref_ok = reference.rcode == Rcode::NoError;

    if (in_ok && ref_ok && in_scope.answers == reference.answers) return DnsVerdict::consistent();

    std::set<Ipv4> hit;
    std::set_intersection(in_scope.answers.begin(), in_scope.answers.end(), block_ips.begin(), block_ips.end(),
                          std::inserter(hit, hit.begin()));
    // reaching here means the reference answer differs
    if (!hit.empty()) return DnsVerdict::tampered(std::move(hit));

    if (!in_ok && !ref_ok) return DnsVerdict::unresolvable_everywhere();
    return DnsVerdict::divergent_unknown();
}

TriageStatus triage_blank(const std::string& domain, AvailabilityPort& availability, DnsPort& dns,
                          const std::string& resolver) {
    if (!is_valid_hostname(domain)) throw InputError("malformed hostname '" + domain + "'");
    const std::string name = lowered(domain);
    if (availability.check(name) == Availability::Available) return TriageStatus::PurchasableDomain;
    DnsAnswer answer = dns.query_a(name, resolver);
    if (answer.rcode == Rcode::NoError && !answer.answers.empty()) return TriageStatus::Resolvable;
    return TriageStatus::NoARecord;
}

FixtureRegistry::FixtureRegistry(std::map<std::string, Entry> entries) {
    for (auto& [domain, entry] : entries) entries_[lowered(domain)] = std::move(entry);
}

FixtureRegistry FixtureRegistry::parse(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("availability fixture is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw InputError("availability fixture must be a JSON object");
    std::map<std::string, Entry> entries;
    for (const auto& [domain, value] : doc.items()) {
        if (!is_valid_hostname(domain)) throw InputError("availability fixture: malformed hostname '" + domain + "'");
        if (!value.is_object()) throw InputError("availability fixture: entry for '" + domain + "' is not an object");
        Entry e;
        try {
            e.available = value.at("available").get<bool>();
            for (const auto& ip : value.value("a_records", nlohmann::json::array())) {
                e.a_records.insert(Ipv4::parse(ip.get<std::string>()));
            }
        } catch (const nlohmann::json::exception& ex) {
            throw InputError("availability fixture: bad entry for '" + domain + "': " + ex.what());
        }
        if (e.available && !e.a_records.empty()) {
            throw InputError("availability fixture: '" + domain + "' is available yet has A records");
        }
        entries.emplace(domain, std::move(e));
    }
    return FixtureRegistry(std::move(entries));
}

FixtureRegistry FixtureRegistry::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read availability fixture " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

DnsAnswer FixtureRegistry::query_a(const std::string& domain, const std::string&) {
    auto it = entries_.find(lowered(domain));
    if (it == entries_.end() || it->second.available) return {Rcode::NxDomain, {}};
    return {Rcode::NoError, it->second.a_records};
}

Availability FixtureRegistry::check(const std::string& domain) {
    auto it = entries_.find(lowered(domain));
    if (it == entries_.end()) throw LookupFailedError("no availability data for '" + domain + "'");
    return it->second.available ? Availability::Available : Availability::Registered;
}

}  // namespace censornet
