#include "censornet/prober.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "censornet/errors.hpp"

namespace censornet {

std::string_view to_string(HttpMethod method) { return method == HttpMethod::Head ? "HEAD" : "GET"; }

HttpMethod parse_http_method(std::string_view text) {
    std::string up(text);
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
    if (up == "HEAD") return HttpMethod::Head;
    if (up == "GET") return HttpMethod::Get;
    throw InputError("unsupported HTTP method '" + std::string(text) + "'");
}

std::string_view to_string(FailureKind kind) {
    switch (kind) {
        case FailureKind::None: return "none";
        case FailureKind::DnsFailure: return "dns_failure";
        case FailureKind::ConnectTimeout: return "connect_timeout";
        case FailureKind::ConnectionRefused: return "connection_refused";
        case FailureKind::TlsFailure: return "tls_failure";
        case FailureKind::Timeout: return "timeout";
        case FailureKind::Other: return "other";
    }
    return "other";
}

FailureKind parse_failure_kind(std::string_view text) {
    for (auto k : {FailureKind::None, FailureKind::DnsFailure, FailureKind::ConnectTimeout,
                   FailureKind::ConnectionRefused, FailureKind::TlsFailure, FailureKind::Timeout,
                   FailureKind::Other}) {
        if (to_string(k) == text) return k;
    }
    throw InputError("unknown failure kind '" + std::string(text) + "'");
}

void ProbePolicy::validate() const {
    if (!(connect_timeout > 0.0) || !(total_timeout > 0.0)) throw InputError("timeouts must be positive");
    if (connect_timeout > total_timeout) throw InputError("connect_timeout must not exceed total_timeout");
    if (max_parallel < 1) throw InputError("max_parallel must be at least 1");
    if (method_chain.empty()) throw InputError("method_chain must not be empty");
}

std::string_view to_string(MatchScope scope) {
    switch (scope) {
        case MatchScope::Body: return "body";
        case MatchScope::Title: return "title";
        case MatchScope::Both: return "both";
    }
    return "body";
}

MatchScope parse_match_scope(std::string_view text) {
    if (text == "body") return MatchScope::Body;
    if (text == "title") return MatchScope::Title;
    if (text == "both") return MatchScope::Both;
    throw InputError("unknown match scope '" + std::string(text) + "'");
}

FingerprintSet FingerprintSet::parse(std::string_view text, MatchScope scope) {
    FingerprintSet fp;
    fp.scope = scope;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        auto e = line.find_last_not_of(" \t\r");
        fp.patterns.push_back(line.substr(b, e - b + 1));
    }
    if (fp.patterns.empty()) throw InputError("fingerprint set contains no patterns");
    return fp;
}

FingerprintSet FingerprintSet::load(const std::filesystem::path& path, MatchScope scope) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read fingerprint file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), scope);
}

FingerprintSet FingerprintSet::default_set() { return FingerprintSet{{"Web Page Blocked!"}, MatchScope::Body}; }

bool is_valid_utf8(std::string_view bytes) {
    std::size_t i = 0;
    const auto* s = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::size_t n = bytes.size();
    while (i < n) {
        unsigned char c = s[i];
        std::size_t len;
        std::uint32_t cp;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xe0) == 0xc0) {
            len = 2;
            cp = c & 0x1f;
        } else if ((c & 0xf0) == 0xe0) {
            len = 3;
            cp = c & 0x0f;
        } else if ((c & 0xf8) == 0xf0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > n) return false;
        for (std::size_t k = 1; k < len; ++k) {
            if ((s[i + k] & 0xc0) != 0x80) return false;
            cp = (cp << 6) | (s[i + k] & 0x3f);
        }
        // overlong forms, surrogates, out of range
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) || cp > 0x10ffff ||
            (cp >= 0xd800 && cp <= 0xdfff)) {
            return false;
        }
        i += len;
    }
    return true;
}

namespace {

char fold(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool contains_folded(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return false;
    auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end(),
                          [](char a, char b) { return fold(a) == fold(b); });
    return it != haystack.end();
}

}  // namespace

std::string_view extract_title(std::string_view html) {
    auto find_folded = [html](std::string_view tag, std::size_t from) {
        auto it = std::search(html.begin() + static_cast<std::ptrdiff_t>(from), html.end(), tag.begin(), tag.end(),
                              [](char a, char b) { return fold(a) == fold(b); });
        return it == html.end() ? std::string_view::npos : static_cast<std::size_t>(it - html.begin());
    };
    std::size_t open = find_folded("<title", 0);
    if (open == std::string_view::npos) return {};
    std::size_t gt = html.find('>', open);
    if (gt == std::string_view::npos) return {};
    std::size_t close = find_folded("</title", gt + 1);
    if (close == std::string_view::npos) close = html.size();
    return html.substr(gt + 1, close - gt - 1);
}

bool detect_block_page(std::string_view body, const FingerprintSet& fp) {
    if (body.empty() || !is_valid_utf8(body)) return false;
    const std::string_view title = fp.scope == MatchScope::Body ? std::string_view{} : extract_title(body);
    for (const auto& pattern : fp.patterns) {
        if (fp.scope != MatchScope::Title && contains_folded(body, pattern)) return true;
        if (fp.scope != MatchScope::Body && contains_folded(title, pattern)) return true;
    }
    return false;
}

ProbeResult probe_url(const UrlRecord& record, const ProbePolicy& policy, TransportPort& transport) {
    UrlRecord checked = UrlRecord::parse(record.url);
    if (checked.domain != record.domain) throw InputError("record domain does not match its URL: " + record.url);

    double elapsed = 0.0;
    FetchResponse last;
    for (std::size_t i = 0; i < policy.method_chain.size(); ++i) {
        FetchRequest req;
        req.url = record.url;
        req.method = policy.method_chain[i];
        req.follow_redirects = policy.follow_redirects;
        req.connect_timeout = policy.connect_timeout;
        req.total_timeout = policy.total_timeout;
        req.user_agent = policy.user_agent;

        last = transport.fetch(req);
        elapsed += std::max(0.0, last.elapsed);
        const bool retry = last.status ? (*last.status == 405 || *last.status == 501)
                                       : last.failure != FailureKind::DnsFailure;
        if (!retry) break;
    }

    if (last.status && (*last.status < 100 || *last.status > 599)) {
        return ProbeResult::make(record, std::nullopt, elapsed, std::nullopt,
                                 "invalid HTTP status " + std::to_string(*last.status));
    }
    if (!last.status) {
        std::string note(to_string(last.failure));
        if (!last.note.empty()) note += ": " + last.note;
        return ProbeResult::make(record, std::nullopt, elapsed, std::nullopt, std::move(note));
    }
    std::optional<std::string> excerpt;
    if (!last.body.empty()) excerpt = std::move(last.body);
    return ProbeResult::make(record, last.status, elapsed, std::move(excerpt));
}

void parallel_for(std::size_t count, std::size_t max_parallel, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    const std::size_t workers = std::max<std::size_t>(1, std::min(max_parallel, count));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto work = [&] {
        while (!stop.load()) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                stop = true;
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
    }
    if (first_error) std::rethrow_exception(first_error);
}

CensusRun run_census(std::span<const UrlRecord> records, const ProbePolicy& policy, TransportPort& transport) {
    if (records.empty()) throw InputError("run_census: no records to probe");
    policy.validate();
    std::vector<std::optional<ProbeResult>> slots(records.size());
    parallel_for(records.size(), policy.max_parallel,
                 [&](std::size_t i) { slots[i] = probe_url(records[i], policy, transport); });
    CensusRun run;
    run.results.reserve(records.size());
    for (auto& s : slots) run.results.push_back(std::move(*s));
    run.census = build_census(run.results);
    return run;
}

}  // namespace censornet
