#include <doctest.h>

#include <atomic>
#include <chrono>
#include <thread>

#include "censornet/errors.hpp"
#include "censornet/prober.hpp"
#include "test_support.hpp"

using namespace censornet;
using testing::FakeTransport;

TEST_CASE("fingerprint file parsing") {
    auto fp = FingerprintSet::parse("# comment\n\n  Blocked Here  \r\nsecond\n");
    REQUIRE(fp.patterns.size() == 2);
    CHECK(fp.patterns[0] == "Blocked Here");
    CHECK(fp.patterns[1] == "second");
    CHECK_THROWS_AS(FingerprintSet::parse("# only a comment\n\n"), InputError);
    CHECK_THROWS_AS(FingerprintSet::load("/nonexistent/fp.txt"), InputError);
    auto fixture = FingerprintSet::load(testing::fixture("block_fingerprints.txt"));
    CHECK_FALSE(fixture.patterns.empty());
}

TEST_CASE("block page detection is case-insensitive and scoped") {
    FingerprintSet body{{"web page blocked!"}, MatchScope::Body};
    CHECK(detect_block_page("<html><body>WEB PAGE BLOCKED!</body></html>", body));
    CHECK_FALSE(detect_block_page("<html><body>all good</body></html>", body));
    CHECK_FALSE(detect_block_page("", body));

    const std::string titled = "<html><head><TITLE>Web Page Blocked!</TITLE></head><body>x</body></html>";
    const std::string in_body = "<html><head><title>News</title></head><body>Web Page Blocked!</body></html>";
    FingerprintSet title{{"Web Page Blocked!"}, MatchScope::Title};
    CHECK(detect_block_page(titled, title));
    CHECK_FALSE(detect_block_page(in_body, title));
    FingerprintSet both{{"Web Page Blocked!"}, MatchScope::Both};
    CHECK(detect_block_page(titled, both));
    CHECK(detect_block_page(in_body, both));
}

TEST_CASE("non-UTF-8 bodies never match") {
    FingerprintSet fp{{"blocked"}, MatchScope::Body};
    CHECK(detect_block_page("blocked \xc3\xa9", fp));
    CHECK_FALSE(detect_block_page("blocked \xff\xfe", fp));
    CHECK_FALSE(detect_block_page("blocked \xc0\xaf", fp));  // overlong
    CHECK_FALSE(detect_block_page("blocked \xed\xa0\x80", fp));  // surrogate
    CHECK_FALSE(detect_block_page("blocked \xe2\x82", fp));  // truncated
    CHECK(is_valid_utf8("\xf0\x9f\x98\x80"));
    CHECK_FALSE(is_valid_utf8("\xf4\x90\x80\x80"));
}

TEST_CASE("title extraction") {
    CHECK(extract_title("<html><title>Hello</title></html>") == "Hello");
    CHECK(extract_title("<TITLE lang=en>Hi</Title>") == "Hi");
    CHECK(extract_title("<p>no title</p>").empty());
    CHECK(extract_title("<title>unterminated") == "unterminated");
}

TEST_CASE("policy validation") {
    ProbePolicy p;
    CHECK_NOTHROW(p.validate());
    p.connect_timeout = 0;
    CHECK_THROWS_AS(p.validate(), InputError);
    p = {};
    p.connect_timeout = 40;
    CHECK_THROWS_AS(p.validate(), InputError);
    p = {};
    p.max_parallel = 0;
    CHECK_THROWS_AS(p.validate(), InputError);
    p = {};
    p.method_chain.clear();
    CHECK_THROWS_AS(p.validate(), InputError);
    CHECK(parse_match_scope("both") == MatchScope::Both);
    CHECK_THROWS_AS(parse_match_scope("head"), InputError);
}

TEST_CASE("HEAD falls back to GET when the method is refused") {
    FakeTransport t([](const FetchRequest& r) {
        if (r.method == HttpMethod::Head) return FetchResponse::ok(405, "", 0.1);
        return FetchResponse::ok(200, "hello", 0.2);
    });
    auto res = probe_url(UrlRecord::parse("http://a.example/"), ProbePolicy{}, t);
    CHECK(res.status_class == StatusClass::ok200());
    CHECK(res.raw_status == 200);
    CHECK(res.response_time == doctest::Approx(0.3));
    REQUIRE(res.body_excerpt);
    CHECK(*res.body_excerpt == "hello");
    auto reqs = t.requests();
    REQUIRE(reqs.size() == 2);
    CHECK(reqs[0].method == HttpMethod::Head);
    CHECK(reqs[1].method == HttpMethod::Get);
    CHECK_FALSE(reqs[0].follow_redirects);
}

TEST_CASE("a successful HEAD is not repeated") {
    FakeTransport t([](const FetchRequest&) { return FetchResponse::ok(404, "", 0.0); });
    auto res = probe_url(UrlRecord::parse("http://a.example/"), ProbePolicy{}, t);
    CHECK(res.status_class == StatusClass::other(404));
    CHECK(t.requests().size() == 1);
}

TEST_CASE("name resolution failure is final and yields a blank status") {
    FakeTransport t([](const FetchRequest&) { return FetchResponse::failed(FailureKind::DnsFailure, "NXDOMAIN"); });
    auto res = probe_url(UrlRecord::parse("http://gone.example/"), ProbePolicy{}, t);
    CHECK(res.status_class == StatusClass::blank0());
    CHECK_FALSE(res.raw_status);
    REQUIRE(res.error_note);
    CHECK(res.error_note->find("dns_failure") == 0);
    CHECK(t.requests().size() == 1);
}

TEST_CASE("other transport failures retry with the next method") {
    FakeTransport t([](const FetchRequest& r) {
        if (r.method == HttpMethod::Head) return FetchResponse::failed(FailureKind::Timeout, "slow");
        return FetchResponse::ok(302, "", 0.0, "http://elsewhere.example/");
    });
    auto res = probe_url(UrlRecord::parse("http://a.example/"), ProbePolicy{}, t);
    CHECK(res.status_class == StatusClass::found302());
    CHECK(t.requests().size() == 2);

    FakeTransport dead([](const FetchRequest&) { return FetchResponse::failed(FailureKind::ConnectTimeout, ""); });
    auto none = probe_url(UrlRecord::parse("http://a.example/"), ProbePolicy{}, dead);
    CHECK(none.status_class == StatusClass::blank0());
    CHECK(none.error_note == "connect_timeout");
    CHECK(dead.requests().size() == 2);
}

TEST_CASE("a permanent redirect is recorded as such, not followed") {
    FakeTransport t([](const FetchRequest& r) {
        if (r.url == "http://old.example/") return FetchResponse::ok(301, "", 0.0, "http://new.example/");
        return FetchResponse::ok(200, "", 0.0);
    });
    auto res = probe_url(UrlRecord::parse("http://old.example/"), ProbePolicy{}, t);
    CHECK(res.status_class == StatusClass::moved301());
    for (const auto& r : t.requests()) CHECK(r.url == "http://old.example/");
}

TEST_CASE("an out-of-range status from the transport becomes blank") {
    FakeTransport t([](const FetchRequest&) { return FetchResponse::ok(42, "", 0.0); });
    auto res = probe_url(UrlRecord::parse("http://a.example/"), ProbePolicy{}, t);
    CHECK(res.status_class == StatusClass::blank0());
    REQUIRE(res.error_note);
}

TEST_CASE("policy values reach the transport") {
    FakeTransport t([](const FetchRequest&) { return FetchResponse::ok(200, "", 0.0); });
    ProbePolicy p;
    p.connect_timeout = 2;
    p.total_timeout = 5;
    p.user_agent = "agent/2";
    p.method_chain = {HttpMethod::Get};
    probe_url(UrlRecord::parse("http://a.example/"), p, t);
    auto r = t.requests().at(0);
    CHECK(r.method == HttpMethod::Get);
    CHECK(r.connect_timeout == 2);
    CHECK(r.total_timeout == 5);
    CHECK(r.user_agent == "agent/2");
}

TEST_CASE("census keeps input order and respects the parallelism bound") {
    std::atomic<int> in_flight{0};
    std::atomic<int> peak{0};
    FakeTransport t([&](const FetchRequest& r) {
        int now = ++in_flight;
        int seen = peak.load();
        while (now > seen && !peak.compare_exchange_weak(seen, now)) {
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
        --in_flight;
        int code = r.url.find("odd") != std::string::npos ? 301 : 200;
        return FetchResponse::ok(code, "", 0.0);
    });
    std::vector<UrlRecord> records;
    for (int i = 0; i < 60; ++i) {
        records.push_back(UrlRecord::parse("http://" + std::string(i % 2 ? "odd" : "even") + std::to_string(i) +
                                           ".example/"));
    }
    ProbePolicy p;
    p.max_parallel = 4;
    auto run = run_census(records, p, t);
    REQUIRE(run.results.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) CHECK(run.results[i].record == records[i]);
    CHECK(peak.load() <= 4);
    CHECK(peak.load() >= 1);
    CHECK(run.census.count(StatusClass::ok200()) == 30);
    CHECK(run.census.count(StatusClass::moved301()) == 30);
    CHECK(run.census.total() == 60);
}

TEST_CASE("census rejects an empty list") {
    FakeTransport t([](const FetchRequest&) { return FetchResponse::ok(200, "", 0.0); });
    std::vector<UrlRecord> none;
    CHECK_THROWS_AS(run_census(none, ProbePolicy{}, t), InputError);
}

TEST_CASE("parallel_for propagates the first exception") {
    std::atomic<int> calls{0};
    CHECK_THROWS_AS(parallel_for(100, 3,
                                 [&](std::size_t i) {
                                     ++calls;
                                     if (i == 5) throw InputError("boom");
                                 }),
                    InputError);
    CHECK(calls.load() <= 100);
    std::vector<int> hit(50, 0);
    parallel_for(50, 8, [&](std::size_t i) { hit[i] = 1; });
    for (int h : hit) CHECK(h == 1);
}
