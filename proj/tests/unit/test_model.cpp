#include <doctest.h>

#include <random>

#include "censornet/errors.hpp"
#include "censornet/model.hpp"

using namespace censornet;

TEST_CASE("Ipv4 parses dotted quads and prints them back") {
    CHECK(Ipv4::parse("198.51.100.1").value() == 0xC6336401u);
    CHECK(Ipv4::parse("0.0.0.0").to_string() == "0.0.0.0");
    CHECK(Ipv4::parse("255.255.255.255").to_string() == "255.255.255.255");
    for (const char* bad : {"", "1.2.3", "1.2.3.4.5", "256.1.1.1", "01.2.3.4", "1..2.3", "a.b.c.d", "1.2.3.4 "}) {
        CAPTURE(bad);
        CHECK_FALSE(Ipv4::try_parse(bad));
        CHECK_THROWS_AS(Ipv4::parse(bad), InputError);
    }
    CHECK(Ipv4::parse("10.0.0.1") < Ipv4::parse("10.0.0.2"));
}

TEST_CASE("Ipv4 text round trip over random addresses") {
    std::mt19937 rng(3);
    for (int i = 0; i < 2000; ++i) {
        Ipv4 ip(static_cast<std::uint32_t>(rng()));
        CHECK(Ipv4::parse(ip.to_string()) == ip);
    }
}

TEST_CASE("hostname validation") {
    CHECK(is_valid_hostname("example.com"));
    CHECK(is_valid_hostname("EXAMPLE.com."));
    CHECK(is_valid_hostname("a_b.example"));
    CHECK(is_valid_hostname("89.com"));
    CHECK_FALSE(is_valid_hostname(""));
    CHECK_FALSE(is_valid_hostname("-lead.com"));
    CHECK_FALSE(is_valid_hostname("trail-.com"));
    CHECK_FALSE(is_valid_hostname("a..b"));
    CHECK_FALSE(is_valid_hostname("silky moms.com"));
    CHECK_FALSE(is_valid_hostname(std::string(64, 'a') + ".com"));
    CHECK(is_valid_hostname(std::string(63, 'a') + ".com"));
}

TEST_CASE("UrlRecord parsing") {
    auto r = UrlRecord::parse("http://Example.COM:8080/a/b?q=1");
    CHECK(r.url == "http://Example.COM:8080/a/b?q=1");
    CHECK(r.domain == "example.com");
    CHECK(r.scheme == Scheme::Http);
    REQUIRE(r.port);
    CHECK(*r.port == 8080);
    CHECK(r.path == "/a/b?q=1");

    auto s = UrlRecord::parse("https://theporndude.com");
    CHECK(s.scheme == Scheme::Https);
    CHECK(s.path == "/");
    CHECK_FALSE(s.port);

    auto q = UrlRecord::parse("http://example.com?x=1");
    CHECK(q.path == "/?x=1");
}

TEST_CASE("UrlRecord rejects malformed input with a reason") {
    const char* bad[] = {"not a url",           "http://silky moms.com/", "ftp://example.com/",
                         "http://user@host.com/", "http://host.com:0/",    "http://host.com:99999/",
                         "http:///path",        "m\xd8\xa7\xd8\xaf\xd9\x85" "amas.com", "http://m\xd8\xa7" "d.com/",
                         "http://-bad.com/",    ""};
    for (const char* text : bad) {
        CAPTURE(text);
        std::string why;
        CHECK_FALSE(UrlRecord::try_parse(text, &why));
        CHECK_FALSE(why.empty());
        CHECK_THROWS_AS(UrlRecord::parse(text), InputError);
    }
}

TEST_CASE("UrlRecord equality and ordering follow the URL text") {
    auto a = UrlRecord::parse("http://a.com/");
    auto b = UrlRecord::parse("http://b.com/");
    CHECK(a == UrlRecord::parse("http://a.com/"));
    CHECK(a < b);
    CHECK_FALSE(a == UrlRecord::parse("http://A.com/"));
}

TEST_CASE("status taxonomy") {
    CHECK(classify_status(200) == StatusClass::ok200());
    CHECK(classify_status(301) == StatusClass::moved301());
    CHECK(classify_status(302) == StatusClass::found302());
    CHECK(classify_status(std::nullopt) == StatusClass::blank0());
    CHECK(classify_status(404).kind() == StatusClass::Kind::Other);
    CHECK(classify_status(404).code() == 404);
    CHECK_THROWS_AS(classify_status(99), InputError);
    CHECK_THROWS_AS(classify_status(600), InputError);
    CHECK_THROWS_AS(classify_status(0), InputError);
    CHECK_THROWS_AS(StatusClass::other(200), InputError);

    CHECK(StatusClass::ok200().description() == "OK");
    CHECK(StatusClass::moved301().description() == "Moved Permanently");
    CHECK(StatusClass::found302().description() == "Found");
    CHECK(StatusClass::blank0().description() == "Name Not Resolved");
    CHECK(StatusClass::blank0().key() == "0");

    for (int code : {0, 200, 301, 302, 404, 418, 503}) {
        StatusClass c = code == 0 ? StatusClass::blank0() : classify_status(code);
        CHECK(StatusClass::from_key(c.key()) == c);
    }
    CHECK_THROWS_AS(StatusClass::from_key("abc"), InputError);
    CHECK_THROWS_AS(StatusClass::from_key(""), InputError);

    CHECK(StatusClass::found302() < StatusClass::moved301());
    CHECK(StatusClass::moved301() < StatusClass::ok200());
    CHECK(StatusClass::ok200() < StatusClass::blank0());
    CHECK(StatusClass::blank0() < StatusClass::other(404));
    CHECK(StatusClass::other(404) < StatusClass::other(500));
}

TEST_CASE("every status in range maps to exactly one class") {
    for (int code = 100; code <= 599; ++code) {
        StatusClass c = classify_status(code);
        int dedicated = (code == 200) + (code == 301) + (code == 302);
        CHECK((c.kind() == StatusClass::Kind::Other) == (dedicated == 0));
        CHECK(c.code() == code);
    }
}

TEST_CASE("ProbeResult::make derives the class and bounds the excerpt") {
    auto rec = UrlRecord::parse("http://example.com/");
    auto r = ProbeResult::make(rec, 302, 0.25, std::string(kBodyExcerptLimit + 10, 'x'));
    CHECK(r.status_class == StatusClass::found302());
    REQUIRE(r.body_excerpt);
    CHECK(r.body_excerpt->size() == kBodyExcerptLimit);
    CHECK_THROWS_AS(ProbeResult::make(rec, 200, -1.0), InputError);
    auto blank = ProbeResult::make(rec, std::nullopt, 0.0, std::nullopt, "dns_failure");
    CHECK(blank.status_class == StatusClass::blank0());
}

TEST_CASE("census conservation over random results") {
    std::mt19937 rng(11);
    const int codes[] = {0, 200, 301, 302, 404, 500};
    auto rec = UrlRecord::parse("http://example.com/");
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<ProbeResult> results;
        std::size_t n = rng() % 300;
        std::map<int, std::size_t> expected;
        for (std::size_t i = 0; i < n; ++i) {
            int code = codes[rng() % 6];
            ++expected[code];
            results.push_back(ProbeResult::make(rec, code ? std::optional<int>(code) : std::nullopt, 0.0));
        }
        CensusTable t = build_census(results);
        CHECK(t.total() == n);
        std::size_t sum = 0;
        for (const auto& [cls, count] : t.counts()) sum += count;
        CHECK(sum == n);
        for (const auto& [code, count] : expected) {
            StatusClass c = code == 0 ? StatusClass::blank0() : classify_status(code);
            CHECK(t.count(c) == count);
        }
    }
}

TEST_CASE("CensusTable::from_counts checks the total") {
    std::map<StatusClass, std::size_t> counts{{StatusClass::ok200(), 449}, {StatusClass::moved301(), 186}};
    CHECK(CensusTable::from_counts(counts, 635).total() == 635);
    CHECK_THROWS_AS(CensusTable::from_counts(counts, 815), InputError);
}

TEST_CASE("page outcome names round trip") {
    for (auto o : {PageOutcome::BlockPage, PageOutcome::Content, PageOutcome::Unreachable}) {
        CHECK(parse_page_outcome(to_string(o)) == o);
    }
    CHECK_THROWS_AS(parse_page_outcome("Blocked"), InputError);
}

TEST_CASE("StratumPlan validation") {
    auto a = UrlRecord::parse("http://a.com/");
    auto b = UrlRecord::parse("http://b.com/");
    StratumPlan p{StatusClass::ok200(), 3, 2, {a, b, a}, {a, a}};
    CHECK_NOTHROW(p.validate());  // the member list holds a twice

    StratumPlan dup{StatusClass::ok200(), 2, 2, {a, b}, {a, a}};
    CHECK_THROWS_AS(dup.validate(), InputError);

    StratumPlan stranger{StatusClass::ok200(), 2, 1, {a, b}, {UrlRecord::parse("http://c.com/")}};
    CHECK_THROWS_AS(stranger.validate(), InputError);

    StratumPlan over{StatusClass::ok200(), 1, 2, {a}, {a, b}};
    CHECK_THROWS_AS(over.validate(), InputError);

    StratumPlan short_sample{StatusClass::ok200(), 2, 2, {a, b}, {a}};
    CHECK_THROWS_AS(short_sample.validate(), InputError);
}
