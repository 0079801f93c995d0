#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace censornet {

enum class HttpMethod { Head, Get };

std::string_view to_string(HttpMethod method);
HttpMethod parse_http_method(std::string_view text);

/// Why a request produced no HTTP status.
enum class FailureKind {
    None,
    DnsFailure,
    ConnectTimeout,
    ConnectionRefused,
    TlsFailure,
    Timeout,
    Other,
};

std::string_view to_string(FailureKind kind);
FailureKind parse_failure_kind(std::string_view text);

struct FetchRequest {
    std::string url;
    HttpMethod method = HttpMethod::Get;
    bool follow_redirects = false;
    double connect_timeout = 10.0;
    double total_timeout = 30.0;
    std::string user_agent = "censornet/1.0";
};

/// Outcome of one request. status is present iff failure == None.
struct FetchResponse {
    std::optional<int> status;
    std::string body;
    std::optional<std::string> location;
    double elapsed = 0.0;  // seconds until the status line arrived
    FailureKind failure = FailureKind::None;
    std::string note;

    static FetchResponse ok(int status, std::string body, double elapsed,
                            std::optional<std::string> location = std::nullopt) {
        FetchResponse r;
        r.status = status;
        r.body = std::move(body);
        r.elapsed = elapsed;
        r.location = std::move(location);
        return r;
    }
    static FetchResponse failed(FailureKind kind, std::string note, double elapsed = 0.0) {
        FetchResponse r;
        r.failure = kind;
        r.note = std::move(note);
        r.elapsed = elapsed;
        return r;
    }
};

/// Abstract request interface shared by the live network client and the
/// simulator. Implementations must be safe to call concurrently.
class TransportPort {
public:
    virtual ~TransportPort() = default;
    virtual FetchResponse fetch(const FetchRequest& request) = 0;
};

}  // namespace censornet
