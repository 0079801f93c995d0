#pragma once

// Expected event sequences for one resolve-then-fetch, derived directly from
// a configuration without going through the simulator.

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "censornet/simnet.hpp"

namespace oracle {

using censornet::PageOutcome;
using censornet::sim::SimEvent;

struct ExpectedTrace {
    std::vector<SimEvent::Kind> kinds;
    PageOutcome outcome = PageOutcome::Unreachable;
    std::string answer;  // comma-joined A records handed to the client, or empty
};

inline ExpectedTrace expected_trace(const censornet::sim::SimConfig& c, std::string domain, const std::string& path) {
    std::transform(domain.begin(), domain.end(), domain.begin(), [](unsigned char ch) { return std::tolower(ch); });
    using K = SimEvent::Kind;
    ExpectedTrace t;
    t.kinds.push_back(K::DnsQuery);

    auto on = c.intercept_enabled.find(path);
    bool intercepting = on == c.intercept_enabled.end() || on->second;
    bool blocked = intercepting && c.blocklist.count(domain) > 0;

    std::vector<censornet::Ipv4> ips;
    if (blocked) {
        t.kinds.push_back(K::DnsIntercepted);
        if (c.intercept_mode == censornet::sim::InterceptMode::Drop) return t;
        ips.push_back(c.block_server_ip);
    } else {
        t.kinds.push_back(K::DnsForwarded);
        auto z = c.upstream_zone.find(domain);
        if (z == c.upstream_zone.end()) return t;
        ips.assign(z->second.begin(), z->second.end());
    }
    for (const auto& ip : ips) {
        if (!t.answer.empty()) t.answer += ",";
        t.answer += ip.to_string();
    }
    if (ips.empty()) return t;

    t.kinds.push_back(K::HttpRequest);
    auto pf = c.path_failures.find(path);
    if (pf != c.path_failures.end() && pf->second.count(domain)) return t;

    const auto first = ips.front();
    if (first == c.block_server_ip) {
        t.kinds.push_back(K::BlockPageServed);
        t.outcome = PageOutcome::BlockPage;
        return t;
    }
    auto s = c.scripted_http.find(domain);
    if (s != c.scripted_http.end() && s->second.failure != censornet::FailureKind::None) return t;
    t.kinds.push_back(K::ContentServed);
    t.outcome = PageOutcome::Content;
    return t;
}

}  // namespace oracle
