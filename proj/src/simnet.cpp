#include "censornet/simnet.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "censornet/errors.hpp"

namespace censornet::sim {

namespace {

using nlohmann::json;

std::string lowered(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    if (!out.empty() && out.back() == '.') out.pop_back();
    return out;
}

constexpr int kMaxRedirects = 10;

std::string_view to_string(InterceptMode mode) { return mode == InterceptMode::Drop ? "drop" : "bogus_ip"; }

InterceptMode parse_intercept_mode(std::string_view text) {
    if (text == "bogus_ip") return InterceptMode::BogusIp;
    if (text == "drop") return InterceptMode::Drop;
    throw InputError("unknown intercept_mode '" + std::string(text) + "'");
}

std::string join_ips(const std::set<Ipv4>& ips) {
    std::string out;
    for (const auto& ip : ips) {
        if (!out.empty()) out += ',';
        out += ip.to_string();
    }
    return out;
}

class PathTransport final : public TransportPort {
public:
    PathTransport(SimNet& net, std::string path) : net_(net), path_(std::move(path)) {}
    FetchResponse fetch(const FetchRequest& request) override { return net_.fetch(request, path_); }

private:
    SimNet& net_;
    std::string path_;
};

class PathDns final : public DnsPort {
public:
    PathDns(SimNet& net, std::string path) : net_(net), path_(std::move(path)) {}
    DnsAnswer query_a(const std::string& domain, const std::string&) override { return net_.resolve(domain, path_); }

private:
    SimNet& net_;
    std::string path_;
};

}  // namespace

bool SimConfig::intercepts(std::string_view path_label) const {
    auto it = intercept_enabled.find(std::string(path_label));
    return it == intercept_enabled.end() ? true : it->second;
}

const ScriptedHttp* SimConfig::script_for(std::string_view domain) const {
    auto it = scripted_http.find(std::string(domain));
    return it == scripted_http.end() ? nullptr : &it->second;
}

void SimConfig::validate() const {
    for (const auto& [domain, ips] : upstream_zone) {
        if (!is_valid_hostname(domain)) throw InputError("sim config: malformed zone name '" + domain + "'");
        if (ips.count(block_server_ip)) {
            throw InputError("sim config: block_server_ip " + block_server_ip.to_string() +
                             " also appears in the zone record for '" + domain + "'");
        }
    }
    for (const auto& d : blocklist) {
        if (!is_valid_hostname(d)) throw InputError("sim config: malformed blocklist name '" + d + "'");
    }
    if (block_page_status < 100 || block_page_status > 599) throw InputError("sim config: bad block_page_status");
    if (!(default_latency >= 0.0)) throw InputError("sim config: default_latency must be non-negative");
    for (const auto& [domain, s] : scripted_http) {
        if (!(s.latency >= 0.0)) throw InputError("sim config: negative latency scripted for '" + domain + "'");
        if (s.status && (*s.status < 100 || *s.status > 599)) {
            throw InputError("sim config: scripted status out of range for '" + domain + "'");
        }
        if (s.location && !UrlRecord::try_parse(*s.location)) {
            throw InputError("sim config: scripted location for '" + domain + "' is not a URL");
        }
    }
}

SimConfig SimConfig::from_json(const json& doc) {
    if (!doc.is_object()) throw InputError("sim config must be a JSON object");
    SimConfig c;
    try {
        if (auto v = doc.value("schema_version", 1); v != 1) {
            throw InputError("sim config: unsupported schema_version " + std::to_string(v));
        }
        const json blocklist = doc.value("blocklist", json::array());
        for (const auto& d : blocklist) c.blocklist.insert(lowered(d.get<std::string>()));
        const json zone = doc.value("upstream_zone", json::object());
        for (const auto& [domain, ips] : zone.items()) {
            auto& set = c.upstream_zone[lowered(domain)];
            for (const auto& ip : ips) set.insert(Ipv4::parse(ip.get<std::string>()));
        }
        if (doc.contains("block_server_ip")) c.block_server_ip = Ipv4::parse(doc.at("block_server_ip").get<std::string>());
        c.block_page_body = doc.value("block_page_body", c.block_page_body);
        c.block_page_status = doc.value("block_page_status", c.block_page_status);
        c.intercept_mode = parse_intercept_mode(doc.value("intercept_mode", std::string("bogus_ip")));
        c.default_latency = doc.value("default_latency", 0.0);
        const json enabled = doc.value("intercept_enabled", json::object());
        for (const auto& [path, on] : enabled.items()) {
            c.intercept_enabled[path] = on.get<bool>();
        }
        const json failures = doc.value("path_failures", json::object());
        for (const auto& [path, hosts] : failures.items()) {
            auto& set = c.path_failures[path];
            for (const auto& h : hosts) set.insert(lowered(h.get<std::string>()));
        }
        const json scripted = doc.value("scripted_http", json::object());
        for (const auto& [domain, v] : scripted.items()) {
            ScriptedHttp s;
            if (v.contains("status") && !v.at("status").is_null()) s.status = v.at("status").get<int>();
            s.latency = v.value("latency", 0.0);
            if (v.contains("body")) s.body = v.at("body").get<std::string>();
            if (v.contains("location")) s.location = v.at("location").get<std::string>();
            if (v.contains("failure")) s.failure = parse_failure_kind(v.at("failure").get<std::string>());
            c.scripted_http[lowered(domain)] = std::move(s);
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("sim config: ") + e.what());
    }
    c.validate();
    return c;
}

json SimConfig::to_json() const {
    json doc = json::object();
    doc["schema_version"] = 1;
    doc["blocklist"] = blocklist;
    json zone = json::object();
    for (const auto& [domain, ips] : upstream_zone) {
        json arr = json::array();
        for (const auto& ip : ips) arr.push_back(ip.to_string());
        zone[domain] = std::move(arr);
    }
    doc["upstream_zone"] = std::move(zone);
    doc["block_server_ip"] = block_server_ip.to_string();
    doc["block_page_body"] = block_page_body;
    doc["block_page_status"] = block_page_status;
    doc["intercept_mode"] = std::string(to_string(intercept_mode));
    doc["default_latency"] = default_latency;
    doc["intercept_enabled"] = intercept_enabled;
    doc["path_failures"] = path_failures;
    json scripted = json::object();
    for (const auto& [domain, s] : scripted_http) {
        json v = json::object();
        if (s.status) v["status"] = *s.status;
        v["latency"] = s.latency;
        if (s.body) v["body"] = *s.body;
        if (s.location) v["location"] = *s.location;
        if (s.failure != FailureKind::None) v["failure"] = std::string(censornet::to_string(s.failure));
        scripted[domain] = std::move(v);
    }
    doc["scripted_http"] = std::move(scripted);
    return doc;
}

SimConfig SimConfig::parse(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw InputError(std::string("sim config is not valid JSON: ") + e.what());
    }
    return from_json(doc);
}

SimConfig SimConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read sim config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

DnsAnswer intercept_query(std::string_view domain, const SimConfig& config, bool intercepting) {
    const std::string name = lowered(domain);
    if (intercepting && config.blocklist.count(name)) {
        if (config.intercept_mode == InterceptMode::Drop) return {Rcode::Timeout, {}};
        return {Rcode::NoError, {config.block_server_ip}};
    }
    auto it = config.upstream_zone.find(name);
    if (it == config.upstream_zone.end()) return {Rcode::NxDomain, {}};
    return {Rcode::NoError, it->second};
}

std::string synthetic_content(std::string_view domain, std::string_view path) {
    std::string d(domain);
    return "<html><head><title>" + d + "</title></head><body><p>Origin content for " + d + std::string(path) +
           "</p></body></html>";
}

HttpReply serve_http(Ipv4 ip, std::string_view domain, std::string_view path, HttpMethod method,
                     const SimConfig& config) {
    const std::string name = lowered(domain);
    const ScriptedHttp* script = config.script_for(name);
    HttpReply reply;
    reply.latency = script ? script->latency : config.default_latency;

    if (ip == config.block_server_ip) {
        reply.from_block_server = true;
        reply.status = config.block_page_status;
        if (method == HttpMethod::Get) reply.body = config.block_page_body;
        return reply;
    }
    const bool known = std::any_of(config.upstream_zone.begin(), config.upstream_zone.end(),
                                   [ip](const auto& entry) { return entry.second.count(ip) > 0; });
    if (!known) {
        reply.failure = FailureKind::ConnectionRefused;
        return reply;
    }

    const bool root = path.empty() || path == "/";
    if (root && script && script->failure != FailureKind::None) {
        reply.failure = script->failure;
        return reply;
    }
    reply.status = root && script && script->status ? *script->status : 200;
    if (reply.status >= 300 && reply.status < 400) {
        reply.location = script && script->location ? *script->location : "http://" + name + "/home";
        return reply;
    }
    if (method == HttpMethod::Get) {
        reply.body = root && script && script->body ? *script->body : synthetic_content(name, root ? "/" : path);
    }
    return reply;
}

std::string_view to_string(SimEvent::Kind kind) {
    switch (kind) {
        case SimEvent::Kind::DnsQuery: return "DnsQuery";
        case SimEvent::Kind::DnsIntercepted: return "DnsIntercepted";
        case SimEvent::Kind::DnsForwarded: return "DnsForwarded";
        case SimEvent::Kind::HttpRequest: return "HttpRequest";
        case SimEvent::Kind::BlockPageServed: return "BlockPageServed";
        case SimEvent::Kind::ContentServed: return "ContentServed";
    }
    return "DnsQuery";
}

SimEvent::Kind parse_event_kind(std::string_view text) {
    for (auto k : {SimEvent::Kind::DnsQuery, SimEvent::Kind::DnsIntercepted, SimEvent::Kind::DnsForwarded,
                   SimEvent::Kind::HttpRequest, SimEvent::Kind::BlockPageServed, SimEvent::Kind::ContentServed}) {
        if (to_string(k) == text) return k;
    }
    throw InputError("unknown event kind '" + std::string(text) + "'");
}

json event_to_json(const SimEvent& event) {
    return json{{"seq", event.seq},
                {"kind", std::string(to_string(event.kind))},
                {"domain", event.domain},
                {"detail", event.detail}};
}

std::string events_to_jsonl(const std::vector<SimEvent>& events) {
    std::string out;
    for (const auto& e : events) {
        out += event_to_json(e).dump();
        out += '\n';
    }
    return out;
}

SimNet::SimNet(SimConfig config) : config_(std::move(config)) { config_.validate(); }

void SimNet::record(SimEvent::Kind kind, std::string_view domain, std::string detail, std::vector<SimEvent>* trace) {
    std::lock_guard lock(mutex_);
    SimEvent e{next_seq_++, kind, std::string(domain), std::move(detail)};
    if (trace) trace->push_back(e);
    log_.push_back(std::move(e));
}

DnsAnswer SimNet::resolve(std::string_view domain, std::string_view path_label, std::vector<SimEvent>* trace) {
    const std::string name = lowered(domain);
    const bool intercepting = config_.intercepts(path_label);
    record(SimEvent::Kind::DnsQuery, name, "path=" + std::string(path_label), trace);
    DnsAnswer answer = intercept_query(name, config_, intercepting);
    if (intercepting && config_.blocklist.count(name)) {
        record(SimEvent::Kind::DnsIntercepted, name,
               answer.rcode == Rcode::Timeout ? "dropped" : "answer=" + join_ips(answer.answers), trace);
    } else {
        record(SimEvent::Kind::DnsForwarded, name,
               answer.rcode == Rcode::NoError ? "answer=" + join_ips(answer.answers)
                                              : std::string(censornet::to_string(answer.rcode)),
               trace);
    }
    return answer;
}

HttpReply SimNet::serve(Ipv4 ip, std::string_view domain, std::string_view path, HttpMethod method,
                        std::string_view path_label, std::vector<SimEvent>* trace) {
    const std::string name = lowered(domain);
    auto failures = config_.path_failures.find(std::string(path_label));
    if (failures != config_.path_failures.end() && failures->second.count(name)) {
        record(SimEvent::Kind::HttpRequest, name, ip.to_string() + " unreachable from path", trace);
        HttpReply r;
        r.failure = FailureKind::ConnectTimeout;
        return r;
    }
    record(SimEvent::Kind::HttpRequest, name,
           std::string(censornet::to_string(method)) + " " + ip.to_string() + std::string(path), trace);
    HttpReply reply = serve_http(ip, name, path, method, config_);
    {
        std::lock_guard lock(mutex_);
        clock_ += reply.latency;
    }
    if (reply.failure == FailureKind::None) {
        record(reply.from_block_server ? SimEvent::Kind::BlockPageServed : SimEvent::Kind::ContentServed, name,
               "status=" + std::to_string(reply.status), trace);
    }
    return reply;
}

EndToEnd SimNet::end_to_end(std::string_view domain, std::string_view path_label) {
    EndToEnd out;
    out.answer = resolve(domain, path_label, &out.events);
    if (out.answer.rcode != Rcode::NoError || out.answer.answers.empty()) return out;
    HttpReply reply = serve(*out.answer.answers.begin(), domain, "/", HttpMethod::Get, path_label, &out.events);
    if (reply.failure != FailureKind::None) return out;
    out.status = reply.status;
    out.body = std::move(reply.body);
    out.outcome = reply.from_block_server ? PageOutcome::BlockPage : PageOutcome::Content;
    return out;
}

FetchResponse SimNet::fetch(const FetchRequest& request, std::string_view path_label) {
    double elapsed = 0.0;
    std::string url = request.url;
    for (int hop = 0; hop <= kMaxRedirects; ++hop) {
        auto rec = UrlRecord::try_parse(url);
        if (!rec) return FetchResponse::failed(FailureKind::Other, "malformed URL " + url, elapsed);

        DnsAnswer answer = resolve(rec->domain, path_label);
        if (answer.rcode == Rcode::Timeout) return FetchResponse::failed(FailureKind::DnsFailure, "dns timeout", elapsed);
        if (answer.rcode != Rcode::NoError) {
            return FetchResponse::failed(FailureKind::DnsFailure, std::string(censornet::to_string(answer.rcode)),
                                         elapsed);
        }
        if (answer.answers.empty()) return FetchResponse::failed(FailureKind::DnsFailure, "no A record", elapsed);

        HttpReply reply = serve(*answer.answers.begin(), rec->domain, rec->path, request.method, path_label, nullptr);
        elapsed += reply.latency;
        if (reply.failure != FailureKind::None) return FetchResponse::failed(reply.failure, "simulated", elapsed);

        const bool redirect = reply.status >= 300 && reply.status < 400 && reply.location;
        if (!(request.follow_redirects && redirect)) {
            return FetchResponse::ok(reply.status, std::move(reply.body), elapsed, std::move(reply.location));
        }
        url = *reply.location;
    }
    return FetchResponse::failed(FailureKind::Other, "too many redirects", elapsed);
}

std::unique_ptr<TransportPort> SimNet::transport(std::string path_label) {
    return std::make_unique<PathTransport>(*this, std::move(path_label));
}

std::unique_ptr<DnsPort> SimNet::dns(std::string path_label) {
    return std::make_unique<PathDns>(*this, std::move(path_label));
}

std::vector<SimEvent> SimNet::events() const {
    std::lock_guard lock(mutex_);
    return log_;
}

void SimNet::clear_events() {
    std::lock_guard lock(mutex_);
    log_.clear();
    next_seq_ = 1;
}

double SimNet::clock() const {
    std::lock_guard lock(mutex_);
    return clock_;
}

}  // namespace censornet::sim
