// The only translation unit that includes httplib.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <netdb.h>
#include <sys/socket.h>

#include <algorithm>
#include <chrono>
#include <thread>

#include "censornet/errors.hpp"
#include "censornet/live.hpp"

namespace censornet::live {

namespace {

using Clock = std::chrono::steady_clock;

constexpr int kMaxRedirects = 10;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::chrono::microseconds micros(double seconds) {
    return std::chrono::microseconds(static_cast<long long>(std::max(seconds, 0.0) * 1e6));
}

std::string origin_of(const UrlRecord& u) {
    std::string out = std::string(to_string(u.scheme)) + "://" + u.domain;
    if (u.port) out += ":" + std::to_string(*u.port);
    return out;
}

FailureKind map_error(httplib::Error err, double elapsed, double connect_timeout) {
    switch (err) {
        case httplib::Error::ConnectionTimeout: return FailureKind::ConnectTimeout;
        case httplib::Error::Connection:
            return elapsed + 0.05 >= connect_timeout ? FailureKind::ConnectTimeout : FailureKind::ConnectionRefused;
        case httplib::Error::ProxyConnection: return FailureKind::ConnectionRefused;
        case httplib::Error::Read:
        case httplib::Error::Write: return FailureKind::Timeout;
        case httplib::Error::SSLConnection:
        case httplib::Error::SSLLoadingCerts:
        case httplib::Error::SSLServerVerification: return FailureKind::TlsFailure;
        default: return FailureKind::Other;
    }
}

// Applied before connecting so that name-resolution failures are reported as
// such rather than as a generic connection error.
std::optional<std::string> resolution_error(const std::string& host) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    int rc = ::getaddrinfo(host.c_str(), nullptr, &hints, &res);
    if (res) ::freeaddrinfo(res);
    if (rc == 0) return std::nullopt;
    return std::string(::gai_strerror(rc));
}

}  // namespace

std::string resolve_location(const UrlRecord& base, std::string_view location) {
    if (location.find("://") != std::string_view::npos) return std::string(location);
    if (location.starts_with("//")) return std::string(to_string(base.scheme)) + ":" + std::string(location);
    if (location.starts_with("/")) return origin_of(base) + std::string(location);
    std::string dir = base.path;
    auto q = dir.find_first_of("?#");
    if (q != std::string::npos) dir.erase(q);
    dir.erase(dir.rfind('/') + 1);
    return origin_of(base) + dir + std::string(location);
}

HttpTransport::HttpTransport(HttpTransportOptions options) : options_(std::move(options)) {}

FetchResponse HttpTransport::fetch(const FetchRequest& request) {
    const auto start = Clock::now();
    std::string url = request.url;
    for (int hop = 0; hop <= kMaxRedirects; ++hop) {
        std::string why;
        auto rec = UrlRecord::try_parse(url, &why);
        if (!rec) return FetchResponse::failed(FailureKind::Other, "malformed URL: " + why, seconds_since(start));

        double remaining = request.total_timeout - seconds_since(start);
        if (remaining <= 0) return FetchResponse::failed(FailureKind::Timeout, "total timeout", seconds_since(start));

        FetchResponse r = fetch_once(*rec, request, remaining);
        r.elapsed = seconds_since(start);
        const bool redirect = r.status && *r.status >= 300 && *r.status < 400 && r.location;
        if (!request.follow_redirects || !redirect) return r;
        url = resolve_location(*rec, *r.location);
    }
    return FetchResponse::failed(FailureKind::Other, "too many redirects", seconds_since(start));
}

FetchResponse HttpTransport::fetch_once(const UrlRecord& url, const FetchRequest& request, double budget) {
    const auto start = Clock::now();
    const bool direct = !options_.proxy_host && !options_.connect_host;
    if (direct) {
        if (auto err = resolution_error(url.domain)) return FetchResponse::failed(FailureKind::DnsFailure, *err);
    }

    std::string origin;
    if (options_.connect_host) {
        origin = "http://" + *options_.connect_host + ":" + std::to_string(options_.connect_port);
    } else {
        origin = origin_of(url);
    }

    httplib::Client cli(origin);
    cli.set_connection_timeout(micros(std::min(request.connect_timeout, budget)));
    cli.set_read_timeout(micros(budget));
    cli.set_write_timeout(micros(budget));
    cli.set_follow_location(false);
    cli.enable_server_certificate_verification(options_.verify_tls);
    if (options_.proxy_host) cli.set_proxy(*options_.proxy_host, options_.proxy_port);

    httplib::Headers headers{{"User-Agent", request.user_agent}};
    if (options_.connect_host) {
        headers.emplace("Host", url.port ? url.domain + ":" + std::to_string(*url.port) : url.domain);
    }

    httplib::Result res = request.method == HttpMethod::Head ? cli.Head(url.path, headers) : cli.Get(url.path, headers);
    const double elapsed = seconds_since(start);
    if (!res) {
        auto err = res.error();
        return FetchResponse::failed(map_error(err, elapsed, request.connect_timeout), httplib::to_string(err), elapsed);
    }
    if (res->has_header(kFailureHeader)) {
        return FetchResponse::failed(parse_failure_kind(res->get_header_value(kFailureHeader)),
                                     "reported by upstream simulator", elapsed);
    }
    std::optional<std::string> location;
    if (res->has_header("Location")) location = res->get_header_value("Location");
    return FetchResponse::ok(res->status, std::move(res->body), elapsed, std::move(location));
}

RdapAvailabilityPort::RdapAvailabilityPort(std::string base_url, double timeout_seconds)
    : base_url_(std::move(base_url)), timeout_(timeout_seconds) {}

Availability RdapAvailabilityPort::check(const std::string& domain) {
    if (!is_valid_hostname(domain)) throw InputError("not a hostname: '" + domain + "'");
    httplib::Client cli(base_url_);
    cli.set_connection_timeout(micros(timeout_));
    cli.set_read_timeout(micros(timeout_));
    cli.set_follow_location(true);
    auto res = cli.Get("/domain/" + domain, httplib::Headers{{"Accept", "application/rdap+json"}});
    if (!res) throw LookupFailedError("RDAP lookup for " + domain + " failed: " + httplib::to_string(res.error()));
    if (res->status == 404) return Availability::Available;
    if (res->status == 200) return Availability::Registered;
    throw LookupFailedError("RDAP lookup for " + domain + " returned HTTP " + std::to_string(res->status));
}

struct SimLoopbackServer::Impl {
    Impl(sim::SimNet& n, std::string label) : net(n), path_label(std::move(label)) {}

    sim::SimNet& net;
    std::string path_label;
    httplib::Server server;
    std::thread thread;
};

SimLoopbackServer::SimLoopbackServer(sim::SimNet& net, std::string path_label)
    : impl_(std::make_unique<Impl>(net, std::move(path_label))) {}

SimLoopbackServer::~SimLoopbackServer() { stop(); }

int SimLoopbackServer::start() {
    if (impl_->thread.joinable()) return port_;
    Impl* impl = impl_.get();
    impl->server.Get(".*", [impl](const httplib::Request& req, httplib::Response& res) {
        std::string host = req.get_header_value("Host");
        if (auto colon = host.find(':'); colon != std::string::npos) host.erase(colon);
        std::string target = req.target.empty() ? "/" : req.target;

        FetchRequest fr;
        fr.url = "http://" + host + target;
        fr.method = req.method == "HEAD" ? HttpMethod::Head : HttpMethod::Get;
        fr.follow_redirects = false;
        FetchResponse r = impl->net.fetch(fr, impl->path_label);
        if (r.failure != FailureKind::None) {
            res.status = 502;
            res.set_header(kFailureHeader, std::string(to_string(r.failure)));
            return;
        }
        res.status = *r.status;
        if (r.location) res.set_header("Location", *r.location);
        res.set_content(r.body, "text/html; charset=utf-8");
    });
    port_ = impl->server.bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw std::runtime_error("cannot bind a loopback port");
    impl->thread = std::thread([impl] { impl->server.listen_after_bind(); });
    impl->server.wait_until_ready();
    return port_;
}

void SimLoopbackServer::stop() {
    if (!impl_ || !impl_->thread.joinable()) return;
    impl_->server.stop();
    impl_->thread.join();
}

}  // namespace censornet::live
