#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <random>

#include "censornet/errors.hpp"
#include "censornet/live.hpp"

namespace censornet::live {

namespace {

constexpr std::uint16_t kTypeA = 1;
constexpr std::uint16_t kClassIn = 1;

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> msg) : msg_(msg) {}

    std::uint8_t u8() {
        need(1);
        return msg_[pos_++];
    }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>(msg_[pos_] << 8 | msg_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        std::uint32_t hi = u16();
        return hi << 16 | u16();
    }
    void skip(std::size_t n) {
        need(n);
        pos_ += n;
    }
    // Names are skipped rather than decoded; only the answer type matters.
    void skip_name() {
        for (int labels = 0; labels < 128; ++labels) {
            std::uint8_t len = u8();
            if (len == 0) return;
            if ((len & 0xC0) == 0xC0) {
                skip(1);
                return;
            }
            if (len & 0xC0) throw InputError("unsupported DNS label type");
            skip(len);
        }
        throw InputError("DNS name too long");
    }

private:
    void need(std::size_t n) const {
        if (pos_ + n > msg_.size()) throw InputError("truncated DNS message");
    }

    std::span<const std::uint8_t> msg_;
    std::size_t pos_ = 0;
};

struct Endpoint {
    sockaddr_in addr{};
};

Endpoint parse_resolver(const std::string& resolver) {
    std::string host = resolver;
    int port = 53;
    if (auto colon = resolver.find(':'); colon != std::string::npos) {
        host = resolver.substr(0, colon);
        try {
            port = std::stoi(resolver.substr(colon + 1));
        } catch (const std::exception&) {
            throw InputError("bad resolver port in '" + resolver + "'");
        }
        if (port <= 0 || port > 65535) throw InputError("bad resolver port in '" + resolver + "'");
    }
    Ipv4 ip = Ipv4::parse(host);
    Endpoint ep;
    ep.addr.sin_family = AF_INET;
    ep.addr.sin_port = htons(static_cast<std::uint16_t>(port));
    ep.addr.sin_addr.s_addr = htonl(ip.value());
    return ep;
}

class Socket {
public:
    Socket() : fd_(::socket(AF_INET, SOCK_DGRAM, 0)) {}
    ~Socket() {
        if (fd_ >= 0) ::close(fd_);
    }
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    int fd() const { return fd_; }

private:
    int fd_;
};

}  // namespace

std::vector<std::uint8_t> encode_a_query(std::string_view domain, std::uint16_t id) {
    if (!is_valid_hostname(domain)) throw InputError("not a hostname: '" + std::string(domain) + "'");
    if (domain.ends_with('.')) domain.remove_suffix(1);

    std::vector<std::uint8_t> out{static_cast<std::uint8_t>(id >> 8), static_cast<std::uint8_t>(id & 0xFF),
                                  0x01, 0x00,  // RD
                                  0x00, 0x01,  // QDCOUNT
                                  0x00, 0x00, 0x00, 0x00, 0x00, 0x00};
    std::size_t start = 0;
    while (start <= domain.size()) {
        auto dot = domain.find('.', start);
        if (dot == std::string_view::npos) dot = domain.size();
        out.push_back(static_cast<std::uint8_t>(dot - start));
        out.insert(out.end(), domain.begin() + start, domain.begin() + dot);
        start = dot + 1;
    }
    out.push_back(0);
    out.insert(out.end(), {0x00, kTypeA, 0x00, kClassIn});
    return out;
}

DnsAnswer parse_a_response(std::span<const std::uint8_t> message, std::uint16_t id) {
    Reader r(message);
    if (r.u16() != id) throw InputError("DNS response id mismatch");
    std::uint16_t flags = r.u16();
    if (!(flags & 0x8000)) throw InputError("DNS message is not a response");
    std::uint16_t qd = r.u16();
    std::uint16_t an = r.u16();
    r.skip(4);  // NSCOUNT, ARCOUNT

    DnsAnswer answer;
    switch (flags & 0x000F) {
        case 0: answer.rcode = Rcode::NoError; break;
        case 3: answer.rcode = Rcode::NxDomain; return answer;
        default: answer.rcode = Rcode::ServFail; return answer;
    }
    for (std::uint16_t i = 0; i < qd; ++i) {
        r.skip_name();
        r.skip(4);
    }
    for (std::uint16_t i = 0; i < an; ++i) {
        r.skip_name();
        std::uint16_t type = r.u16();
        std::uint16_t cls = r.u16();
        r.skip(4);  // TTL
        std::uint16_t len = r.u16();
        if (type == kTypeA && cls == kClassIn && len == 4) {
            answer.answers.insert(Ipv4(r.u32()));
        } else {
            r.skip(len);
        }
    }
    return answer;
}

DnsAnswer UdpDnsPort::query_a(const std::string& domain, const std::string& resolver) {
    Endpoint ep = parse_resolver(resolver);
    static thread_local std::mt19937 rng{std::random_device{}()};
    const auto id = static_cast<std::uint16_t>(rng());
    const auto query = encode_a_query(domain, id);

    Socket sock;
    if (sock.fd() < 0) return {Rcode::ServFail, {}};
    if (::sendto(sock.fd(), query.data(), query.size(), 0, reinterpret_cast<const sockaddr*>(&ep.addr),
                 sizeof ep.addr) < 0) {
        return {Rcode::ServFail, {}};
    }

    const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_);
    std::uint8_t buf[4096];
    for (;;) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) return {Rcode::Timeout, {}};
        pollfd pfd{sock.fd(), POLLIN, 0};
        int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
        if (ready <= 0) return {Rcode::Timeout, {}};
        sockaddr_in from{};
        socklen_t from_len = sizeof from;
        ssize_t n = ::recvfrom(sock.fd(), buf, sizeof buf, 0, reinterpret_cast<sockaddr*>(&from), &from_len);
        if (n <= 0) continue;
        if (from.sin_addr.s_addr != ep.addr.sin_addr.s_addr || from.sin_port != ep.addr.sin_port) continue;
        try {
            return parse_a_response(std::span<const std::uint8_t>(buf, static_cast<std::size_t>(n)), id);
        } catch (const InputError&) {
            continue;  // stray or spoofed datagram; keep waiting
        }
    }
}

}  // namespace censornet::live
