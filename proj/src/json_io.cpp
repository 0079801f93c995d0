#include "censornet/json_io.hpp"

#include "censornet/errors.hpp"

namespace censornet::json_io {

namespace {

template <class Fn>
auto guarded(const char* what, Fn&& fn) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed ") + what + ": " + e.what());
    }
}

json encode_ips(const std::set<Ipv4>& ips) {
    json arr = json::array();
    for (const auto& ip : ips) arr.push_back(ip.to_string());
    return arr;
}

std::set<Ipv4> decode_ips(const json& j) {
    std::set<Ipv4> out;
    for (const auto& ip : j) out.insert(Ipv4::parse(ip.get<std::string>()));
    return out;
}

}  // namespace

json encode(const UrlRecord& record) { return record.url; }

UrlRecord decode_url_record(const json& j) {
    return guarded("URL record", [&] { return UrlRecord::parse(j.get<std::string>()); });
}

json encode(const ProbeResult& r) {
    json j{{"url", r.record.url},
           {"class", r.status_class.key()},
           {"raw_status", r.raw_status ? json(*r.raw_status) : json(nullptr)},
           {"response_time", r.response_time}};
    if (r.body_excerpt) j["body_excerpt"] = *r.body_excerpt;
    if (r.error_note) j["error_note"] = *r.error_note;
    return j;
}

ProbeResult decode_probe_result(const json& j) {
    return guarded("probe result", [&] {
        std::optional<int> raw;
        if (!j.at("raw_status").is_null()) raw = j.at("raw_status").get<int>();
        std::optional<std::string> body, note;
        if (j.contains("body_excerpt")) body = j.at("body_excerpt").get<std::string>();
        if (j.contains("error_note")) note = j.at("error_note").get<std::string>();
        ProbeResult r = ProbeResult::make(UrlRecord::parse(j.at("url").get<std::string>()), raw,
                                          j.at("response_time").get<double>(), std::move(body), std::move(note));
        if (r.status_class.key() != j.at("class").get<std::string>()) {
            throw InputError("probe result class disagrees with raw_status for " + r.record.url);
        }
        return r;
    });
}

json encode(const CensusTable& census) {
    json j = json::object();
    for (const auto& key : {"200", "301", "302", "0"}) j[key] = 0;
    for (const auto& [cls, n] : census.counts()) j[cls.key()] = n;
    j["total"] = census.total();
    return j;
}

CensusTable decode_census(const json& j) {
    return guarded("census", [&] {
        if (!j.is_object()) throw InputError("census must be a JSON object");
        std::map<StatusClass, std::size_t> counts;
        for (const auto& [key, value] : j.items()) {
            if (key == "total") continue;
            auto n = value.get<std::size_t>();
            if (n > 0) counts[StatusClass::from_key(key)] = n;
        }
        return CensusTable::from_counts(counts, j.at("total").get<std::size_t>());
    });
}

json encode(const StratumPlan& plan) {
    json members = json::array();
    for (const auto& m : plan.members) members.push_back(m.url);
    json sample = json::array();
    for (const auto& s : plan.sample) sample.push_back(s.url);
    return json{{"label", plan.label.key()},
                {"population_size", plan.population_size},
                {"allocation", plan.allocation},
                {"members", std::move(members)},
                {"sample", std::move(sample)}};
}

StratumPlan decode_stratum_plan(const json& j) {
    return guarded("stratum plan", [&] {
        StratumPlan p;
        p.label = StatusClass::from_key(j.at("label").get<std::string>());
        p.population_size = j.at("population_size").get<std::size_t>();
        p.allocation = j.at("allocation").get<std::size_t>();
        for (const auto& m : j.at("members")) p.members.push_back(UrlRecord::parse(m.get<std::string>()));
        for (const auto& s : j.at("sample")) p.sample.push_back(UrlRecord::parse(s.get<std::string>()));
        p.validate();
        return p;
    });
}

json encode(const sampling::SamplingParams& p) {
    return json{{"z", p.z}, {"p", p.p}, {"e", p.e}, {"population", p.population}};
}

sampling::SamplingParams decode_sampling_params(const json& j) {
    return guarded("sampling params", [&] {
        sampling::SamplingParams p{j.at("z").get<double>(), j.at("p").get<double>(), j.at("e").get<double>(),
                                   j.at("population").get<std::size_t>()};
        p.validate();
        return p;
    });
}

json encode(const sampling::SampleSizeResult& s) {
    return json{{"n0_real", s.n0_real}, {"n0", s.n0}, {"n_real", s.n_real}, {"n", s.n}};
}

sampling::SampleSizeResult decode_sample_size(const json& j) {
    return guarded("sample size", [&] {
        return sampling::SampleSizeResult{j.at("n0_real").get<double>(), j.at("n0").get<std::size_t>(),
                                          j.at("n_real").get<double>(), j.at("n").get<std::size_t>()};
    });
}

json encode(const SuccessTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows) {
        rows.push_back(json{{"stratum", r.stratum.key()},
                            {"path_label", r.path_label},
                            {"success_pct", r.success_pct},
                            {"numerator", r.numerator},
                            {"denominator", r.denominator}});
    }
    return json{{"path_label", t.path_label}, {"rows", std::move(rows)}};
}

SuccessTable decode_success_table(const json& j) {
    return guarded("success table", [&] {
        SuccessTable t;
        t.path_label = j.at("path_label").get<std::string>();
        for (const auto& r : j.at("rows")) {
            t.rows.push_back({StatusClass::from_key(r.at("stratum").get<std::string>()),
                              r.at("path_label").get<std::string>(), r.at("success_pct").get<std::size_t>(),
                              r.at("numerator").get<std::size_t>(), r.at("denominator").get<std::size_t>()});
        }
        t.validate();
        return t;
    });
}

json encode(const DnsObservation& o) {
    return json{{"domain", o.domain},
                {"vantage", o.vantage},
                {"resolver", o.resolver},
                {"rcode", std::string(to_string(o.rcode))},
                {"answers", encode_ips(o.answers)}};
}

DnsObservation decode_observation(const json& j) {
    return guarded("DNS observation", [&] {
        return DnsObservation::make(j.at("domain").get<std::string>(), j.at("vantage").get<std::string>(),
                                    j.at("resolver").get<std::string>(),
                                    DnsAnswer{parse_rcode(j.at("rcode").get<std::string>()), decode_ips(j.at("answers"))});
    });
}

json encode(const DnsVerdict& v) {
    return json{{"verdict", std::string(to_string(v.kind()))}, {"injected", encode_ips(v.injected())}};
}

DnsVerdict decode_verdict(const json& j) {
    return guarded("DNS verdict", [&] {
        auto kind = j.at("verdict").get<std::string>();
        if (kind == "Consistent") return DnsVerdict::consistent();
        if (kind == "Tampered") return DnsVerdict::tampered(decode_ips(j.at("injected")));
        if (kind == "DivergentUnknown") return DnsVerdict::divergent_unknown();
        if (kind == "UnresolvableEverywhere") return DnsVerdict::unresolvable_everywhere();
        throw InputError("unknown verdict '" + kind + "'");
    });
}

}  // namespace censornet::json_io
