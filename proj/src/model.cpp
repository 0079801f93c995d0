#include "censornet/model.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>

#include "censornet/errors.hpp"

namespace censornet {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

int kind_rank(StatusClass::Kind kind) {
    switch (kind) {
        case StatusClass::Kind::Found302: return 0;
        case StatusClass::Kind::Moved301: return 1;
        case StatusClass::Kind::Ok200: return 2;
        case StatusClass::Kind::Blank0: return 3;
        case StatusClass::Kind::Other: return 4;
    }
    return 5;
}

}  // namespace

std::optional<Ipv4> Ipv4::try_parse(std::string_view text) {
    if (std::count(text.begin(), text.end(), '.') != 3) return std::nullopt;
    std::uint32_t value = 0;
    std::size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
        std::size_t end = i < 3 ? text.find('.', pos) : text.size();
        std::string_view part = text.substr(pos, end - pos);
        if (part.empty() || part.size() > 3 || (part.size() > 1 && part[0] == '0')) return std::nullopt;
        unsigned octet = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), octet);
        if (ec != std::errc{} || ptr != part.data() + part.size() || octet > 255) return std::nullopt;
        value = (value << 8) | octet;
        pos = end + 1;
    }
    return Ipv4(value);
}

Ipv4 Ipv4::parse(std::string_view text) {
    if (auto ip = try_parse(text)) return *ip;
    throw InputError("invalid IPv4 address: '" + std::string(text) + "'");
}

std::string Ipv4::to_string() const {
    return std::to_string((value_ >> 24) & 0xff) + '.' + std::to_string((value_ >> 16) & 0xff) + '.' +
           std::to_string((value_ >> 8) & 0xff) + '.' + std::to_string(value_ & 0xff);
}

bool is_valid_hostname(std::string_view host) {
    if (!host.empty() && host.back() == '.') host.remove_suffix(1);
    if (host.empty() || host.size() > 253) return false;
    std::size_t start = 0;
    while (start <= host.size()) {
        std::size_t end = host.find('.', start);
        if (end == std::string_view::npos) end = host.size();
        std::string_view label = host.substr(start, end - start);
        if (label.empty() || label.size() > 63) return false;
        if (label.front() == '-' || label.back() == '-') return false;
        for (unsigned char c : label) {
            if (!(std::isalnum(c) || c == '-' || c == '_')) return false;
        }
        if (end == host.size()) break;
        start = end + 1;
    }
    return true;
}

std::string_view to_string(Scheme scheme) { return scheme == Scheme::Https ? "https" : "http"; }

std::optional<UrlRecord> UrlRecord::try_parse(std::string_view text, std::string* why) {
    auto fail = [why](const char* reason) -> std::optional<UrlRecord> {
        if (why) *why = reason;
        return std::nullopt;
    };
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) return fail("empty URL");
    for (unsigned char c : text) {
        if (std::isspace(c)) return fail("whitespace inside URL");
        if (c < 0x20 || c >= 0x7f) return fail("non-ASCII or control character in URL");
    }

    std::size_t sep = text.find("://");
    if (sep == std::string_view::npos) return fail("not an absolute URL");
    std::string scheme = lower(text.substr(0, sep));
    UrlRecord rec;
    if (scheme == "http") {
        rec.scheme = Scheme::Http;
    } else if (scheme == "https") {
        rec.scheme = Scheme::Https;
    } else {
        return fail("unsupported scheme");
    }

    std::string_view rest = text.substr(sep + 3);
    std::size_t path_at = rest.find_first_of("/?#");
    std::string_view authority = rest.substr(0, path_at);
    if (authority.find('@') != std::string_view::npos) return fail("userinfo not supported");

    std::string_view host = authority;
    if (std::size_t colon = authority.rfind(':'); colon != std::string_view::npos) {
        host = authority.substr(0, colon);
        std::string_view port_text = authority.substr(colon + 1);
        unsigned port = 0;
        auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
        if (port_text.empty() || ec != std::errc{} || ptr != port_text.data() + port_text.size() || port == 0 ||
            port > 65535) {
            return fail("invalid port");
        }
        rec.port = static_cast<std::uint16_t>(port);
    }
    if (host.empty()) return fail("empty hostname");
    if (!is_valid_hostname(host)) return fail("invalid hostname");

    rec.domain = lower(host);
    if (!rec.domain.empty() && rec.domain.back() == '.') rec.domain.pop_back();
    if (path_at != std::string_view::npos) {
        std::string_view tail = rest.substr(path_at);
        rec.path = tail.front() == '/' ? std::string(tail) : "/" + std::string(tail);
    }
    rec.url = std::string(text);
    return rec;
}

UrlRecord UrlRecord::parse(std::string_view text) {
    std::string why;
    if (auto rec = try_parse(text, &why)) return std::move(*rec);
    throw InputError("malformed URL '" + std::string(text) + "': " + why);
}

StatusClass StatusClass::other(int code) {
    if (code == 0 || code == 200 || code == 301 || code == 302) {
        throw InputError("StatusClass::other called with a dedicated code " + std::to_string(code));
    }
    return StatusClass(Kind::Other, code);
}

std::string StatusClass::key() const { return std::to_string(code_); }

std::string StatusClass::description() const {
    switch (kind_) {
        case Kind::Ok200: return "OK";
        case Kind::Moved301: return "Moved Permanently";
        case Kind::Found302: return "Found";
        case Kind::Blank0: return "Name Not Resolved";
        case Kind::Other: return "Other (" + std::to_string(code_) + ")";
    }
    return {};
}

StatusClass StatusClass::from_key(std::string_view key) {
    int code = 0;
    auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), code);
    if (key.empty() || ec != std::errc{} || ptr != key.data() + key.size()) {
        throw InputError("invalid status class key '" + std::string(key) + "'");
    }
    if (code == 0) return blank0();
    return classify_status(code);
}

std::strong_ordering StatusClass::operator<=>(const StatusClass& other) const {
    if (auto c = kind_rank(kind_) <=> kind_rank(other.kind_); c != 0) return c;
    return code_ <=> other.code_;
}

StatusClass classify_status(std::optional<int> raw_status) {
    if (!raw_status) return StatusClass::blank0();
    int code = *raw_status;
    if (code < 100 || code > 599) {
        throw InputError("HTTP status out of range [100, 599]: " + std::to_string(code));
    }
    switch (code) {
        case 200: return StatusClass::ok200();
        case 301: return StatusClass::moved301();
        case 302: return StatusClass::found302();
        default: return StatusClass::other(code);
    }
}

ProbeResult ProbeResult::make(UrlRecord record, std::optional<int> raw_status, double response_time,
                              std::optional<std::string> body_excerpt, std::optional<std::string> error_note) {
    if (!(response_time >= 0.0)) throw InputError("response_time must be non-negative");
    ProbeResult r;
    r.status_class = classify_status(raw_status);
    r.record = std::move(record);
    r.raw_status = raw_status;
    r.response_time = response_time;
    if (body_excerpt && body_excerpt->size() > kBodyExcerptLimit) body_excerpt->resize(kBodyExcerptLimit);
    r.body_excerpt = std::move(body_excerpt);
    r.error_note = std::move(error_note);
    return r;
}

void CensusTable::add(const StatusClass& cls, std::size_t n) {
    counts_[cls] += n;
    total_ += n;
}

std::size_t CensusTable::count(const StatusClass& cls) const {
    auto it = counts_.find(cls);
    return it == counts_.end() ? 0 : it->second;
}

CensusTable CensusTable::from_counts(const std::map<StatusClass, std::size_t>& counts, std::size_t total) {
    CensusTable t;
    for (const auto& [cls, n] : counts) t.add(cls, n);
    if (t.total_ != total) {
        throw InputError("census total " + std::to_string(total) + " does not equal the sum of counts " +
                         std::to_string(t.total_));
    }
    return t;
}

CensusTable build_census(std::span<const ProbeResult> results) {
    CensusTable t;
    for (const auto& r : results) t.add(r.status_class);
    return t;
}

std::string_view to_string(PageOutcome outcome) {
    switch (outcome) {
        case PageOutcome::BlockPage: return "BlockPage";
        case PageOutcome::Content: return "Content";
        case PageOutcome::Unreachable: return "Unreachable";
    }
    return "Unreachable";
}

PageOutcome parse_page_outcome(std::string_view text) {
    if (text == "BlockPage") return PageOutcome::BlockPage;
    if (text == "Content") return PageOutcome::Content;
    if (text == "Unreachable") return PageOutcome::Unreachable;
    throw InputError("unknown page outcome '" + std::string(text) + "'");
}

void StratumPlan::validate() const {
    if (population_size == 0) throw InputError("stratum " + label.key() + ": population_size must be positive");
    if (allocation > population_size) {
        throw InputError("stratum " + label.key() + ": allocation exceeds population");
    }
    if (sample.size() != allocation) throw InputError("stratum " + label.key() + ": sample size != allocation");
    // members may legitimately list one URL twice; the sample must be a
    // sub-multiset of members.
    std::map<std::string, long> budget;
    for (const auto& m : members) ++budget[m.url];
    for (const auto& s : sample) {
        if (--budget[s.url] < 0) {
            throw InputError("stratum " + label.key() + ": sample entry '" + s.url +
                             "' is not a distinct member draw");
        }
    }
}

}  // namespace censornet
