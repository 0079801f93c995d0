#pragma once

// In-process model of DNS-interception blocking: a blocklist held by an
// intercepting resolver, an upstream zone answering everything else, a block
// page webserver, and origin servers with scripted behaviour. Provides
// deterministic TransportPort and DnsPort implementations per network path.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "censornet/dns_audit.hpp"
#include "censornet/model.hpp"
#include "censornet/transport.hpp"

namespace censornet::sim {

/// How the interceptor treats a blocklisted query: answer with the block
/// server's address, or drop it so the client times out.
enum class InterceptMode { BogusIp, Drop };

inline constexpr std::string_view kDefaultBlockPageBody =
    "<html><head><title>Web Page Blocked!</title></head><body><h1>Web Page Blocked!</h1>"
    "<p>Access to this address is restricted on this network.</p></body></html>";

/// Scripted origin behaviour for the root path "/" of a domain. Other paths on
/// the same host serve synthetic 200 content.
struct ScriptedHttp {
    std::optional<int> status;  // 200 when unset
    double latency = 0.0;
    std::optional<std::string> body;
    std::optional<std::string> location;  // for 3xx; defaults to http://<domain>/home
    FailureKind failure = FailureKind::None;

    bool operator==(const ScriptedHttp&) const = default;
};

struct SimConfig {
    std::set<std::string> blocklist;
    std::map<std::string, std::set<Ipv4>> upstream_zone;  // empty set: name exists, no A record
    Ipv4 block_server_ip = Ipv4(0xC6336401);               // 198.51.100.1
    std::string block_page_body{kDefaultBlockPageBody};
    int block_page_status = 200;
    std::map<std::string, ScriptedHttp> scripted_http;
    std::map<std::string, bool> intercept_enabled;  // unlisted paths intercept
    InterceptMode intercept_mode = InterceptMode::BogusIp;
    std::map<std::string, std::set<std::string>> path_failures;  // hosts a path cannot reach
    double default_latency = 0.0;

    bool intercepts(std::string_view path_label) const;
    const ScriptedHttp* script_for(std::string_view domain) const;

    /// Throws InputError when the block server address appears in the zone,
    /// a latency is negative, or a scripted status is out of range.
    void validate() const;

    static SimConfig from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;
    static SimConfig parse(std::string_view json_text);
    static SimConfig load(const std::filesystem::path& path);

    bool operator==(const SimConfig&) const = default;
};

/// Resolution as seen from a path. Blocklisted names on an intercepting path
/// get {block_server_ip} (or Timeout in Drop mode); other names get the zone
/// answer, or NXDOMAIN when absent.
DnsAnswer intercept_query(std::string_view domain, const SimConfig& config, bool intercepting);

struct HttpReply {
    FailureKind failure = FailureKind::None;
    int status = 0;
    std::string body;
    std::optional<std::string> location;
    double latency = 0.0;
    bool from_block_server = false;
};

/// What the server at `ip` answers for Host `domain` and `path`. The block
/// server returns the block page for any host; addresses unknown to the
/// simulation refuse the connection.
HttpReply serve_http(Ipv4 ip, std::string_view domain, std::string_view path, HttpMethod method,
                     const SimConfig& config);

std::string synthetic_content(std::string_view domain, std::string_view path);

struct SimEvent {
    enum class Kind { DnsQuery, DnsIntercepted, DnsForwarded, HttpRequest, BlockPageServed, ContentServed };

    std::uint64_t seq = 0;
    Kind kind = Kind::DnsQuery;
    std::string domain;
    std::string detail;

    bool operator==(const SimEvent&) const = default;
};

std::string_view to_string(SimEvent::Kind kind);
SimEvent::Kind parse_event_kind(std::string_view text);

nlohmann::json event_to_json(const SimEvent& event);
/// One JSON object per line.
std::string events_to_jsonl(const std::vector<SimEvent>& events);

struct EndToEnd {
    PageOutcome outcome = PageOutcome::Unreachable;
    DnsAnswer answer;
    std::optional<int> status;
    std::string body;
    std::vector<SimEvent> events;
};

/// A simulation instance. The configuration is immutable; the event log and
/// virtual clock are shared by all paths and safe for concurrent callers.
class SimNet {
public:
    explicit SimNet(SimConfig config);

    const SimConfig& config() const { return config_; }

    /// Resolve then serve exactly once, recording the event trace.
    EndToEnd end_to_end(std::string_view domain, std::string_view path_label);

    /// Full client fetch on a path: resolution, optional redirect following
    /// (at most 10 hops), scripted latency added to the virtual clock.
    FetchResponse fetch(const FetchRequest& request, std::string_view path_label);

    DnsAnswer resolve(std::string_view domain, std::string_view path_label, std::vector<SimEvent>* trace = nullptr);

    /// Transport and resolver bound to one path label; they borrow *this.
    std::unique_ptr<TransportPort> transport(std::string path_label);
    std::unique_ptr<DnsPort> dns(std::string path_label);

    std::vector<SimEvent> events() const;
    void clear_events();
    /// Total virtual seconds consumed by scripted latencies so far.
    double clock() const;

private:
    void record(SimEvent::Kind kind, std::string_view domain, std::string detail, std::vector<SimEvent>* trace);
    HttpReply serve(Ipv4 ip, std::string_view domain, std::string_view path, HttpMethod method,
                    std::string_view path_label, std::vector<SimEvent>* trace);

    const SimConfig config_;
    mutable std::mutex mutex_;
    std::vector<SimEvent> log_;
    std::uint64_t next_seq_ = 1;
    double clock_ = 0.0;
};

}  // namespace censornet::sim
