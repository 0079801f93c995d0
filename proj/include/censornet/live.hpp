#pragma once

// Real-network implementations of the transport, resolver and availability
// ports, plus a loopback HTTP server fronting a simulated path so the live
// client can be exercised without touching the internet.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "censornet/dns_audit.hpp"
#include "censornet/simnet.hpp"
#include "censornet/transport.hpp"

namespace censornet::live {

/// Header the loopback server uses to report a simulated transport failure.
inline constexpr const char* kFailureHeader = "X-Censornet-Failure";

struct HttpTransportOptions {
    /// Forward every request through this HTTP proxy (host, port). Used for
    /// the alternate path, e.g. a local proxy chained to Tor or a VPN.
    std::optional<std::string> proxy_host;
    int proxy_port = 0;
    /// Connect here instead of the URL's host, sending the original Host
    /// header. Skips client-side name resolution.
    std::optional<std::string> connect_host;
    int connect_port = 0;
    bool verify_tls = true;
};

/// Resolves a Location header against the URL it was received for.
std::string resolve_location(const UrlRecord& base, std::string_view location);

class HttpTransport final : public TransportPort {
public:
    explicit HttpTransport(HttpTransportOptions options = {});
    FetchResponse fetch(const FetchRequest& request) override;

private:
    FetchResponse fetch_once(const UrlRecord& url, const FetchRequest& request, double budget);

    HttpTransportOptions options_;
};

/// Wire-format helpers for a single-question A query.
std::vector<std::uint8_t> encode_a_query(std::string_view domain, std::uint16_t id);
/// Throws InputError on a truncated or mismatched message.
DnsAnswer parse_a_response(std::span<const std::uint8_t> message, std::uint16_t id);

/// A queries over UDP. `resolver` is "a.b.c.d" or "a.b.c.d:port".
class UdpDnsPort final : public DnsPort {
public:
    explicit UdpDnsPort(double timeout_seconds = 5.0) : timeout_(timeout_seconds) {}
    DnsAnswer query_a(const std::string& domain, const std::string& resolver) override;

private:
    double timeout_;
};

/// Registration lookup over RDAP: 404 means available, 200 registered, and
/// anything else is a failed lookup.
class RdapAvailabilityPort final : public AvailabilityPort {
public:
    explicit RdapAvailabilityPort(std::string base_url = "https://rdap.org", double timeout_seconds = 15.0);
    Availability check(const std::string& domain) override;

private:
    std::string base_url_;
    double timeout_;
};

/// HTTP server on 127.0.0.1 answering each request as `path_label` would see
/// it in the simulation, keyed on the Host header. Simulated failures come
/// back as 502 with kFailureHeader set to the failure kind.
class SimLoopbackServer {
public:
    SimLoopbackServer(sim::SimNet& net, std::string path_label);
    ~SimLoopbackServer();

    SimLoopbackServer(const SimLoopbackServer&) = delete;
    SimLoopbackServer& operator=(const SimLoopbackServer&) = delete;

    /// Binds an ephemeral port and starts serving; returns the port.
    int start();
    void stop();
    int port() const { return port_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
};

}  // namespace censornet::live
