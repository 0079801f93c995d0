#include <doctest.h>

#include <json.hpp>
#include <random>

#include "censornet/errors.hpp"
#include "censornet/json_io.hpp"
#include "censornet/report.hpp"
#include "censornet/sampling.hpp"
#include "test_support.hpp"

using namespace censornet;
using namespace censornet::report;
using nlohmann::json;

namespace {

CensusTable census_counts() {
    CensusTable t;
    t.add(StatusClass::ok200(), 449);
    t.add(StatusClass::moved301(), 186);
    t.add(StatusClass::found302(), 43);
    t.add(StatusClass::blank0(), 137);
    return t;
}

std::vector<UrlRecord> some_records(std::size_t n, const std::string& tag = "r") {
    std::vector<UrlRecord> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(UrlRecord::parse("http://" + tag + std::to_string(i) + ".example/"));
    return out;
}

}  // namespace

TEST_CASE("format names") {
    for (auto f : {Format::Text, Format::Csv, Format::Json}) CHECK(parse_format(to_string(f)) == f);
    CHECK_THROWS_AS(parse_format("xml"), InputError);
}

TEST_CASE("raw population list keeps every well-formed entry and flags the rest") {
    auto list = parse_url_list(testing::slurp(testing::fixture("urls_raw.txt")));
    CHECK(list.records.size() == 812);
    REQUIRE(list.rejects.size() == 3);
    CHECK(list.rejects[0].line == 19);
    CHECK(list.rejects[0].text == "http://silky moms.com/");
    CHECK(list.rejects[1].line == 81);
    CHECK(list.rejects[1].text == "http://parejas follando.es/");
    CHECK(list.rejects[2].line == 137);
    CHECK(list.rejects[2].text == "http://porno chaud.com/");
    for (const auto& r : list.rejects) CHECK_FALSE(r.reason.empty());
}

TEST_CASE("curated population list parses cleanly") {
    auto list = parse_url_list(testing::slurp(testing::fixture("urls_curated.txt")));
    CHECK(list.records.size() == 815);
    CHECK(list.rejects.empty());
    CHECK(list.records.front().url == "http://theporndude.com/");
}

TEST_CASE("list layouts") {
    auto a = parse_url_list("not a url\n");
    CHECK(a.records.empty());
    REQUIRE(a.rejects.size() == 1);
    CHECK(a.rejects[0].line == 1);
    CHECK(a.rejects[0].text == "not a url");

    auto b = parse_url_list("# header\n\n1\thttp://a.example/\t0.0123\n2 <http://b.example/>\r\n"
                            "3 http://c.example/ 9 http://d.example/\n  http://e.example/ http://f.example/\n");
    REQUIRE(b.records.size() == 6);
    CHECK(b.rejects.empty());
    CHECK(b.records[1].url == "http://b.example/");
    CHECK(b.records[3].url == "http://d.example/");
    CHECK(b.records[5].url == "http://f.example/");

    auto c = parse_url_list("");
    CHECK(c.records.empty());
    CHECK(c.rejects.empty());
}

TEST_CASE("sample stratum lists parse with their response-time column") {
    const char* files[] = {"sample_ok200.tsv", "sample_moved301.tsv", "sample_blank0.tsv",
                           "sample_found302.tsv"};
    const std::size_t sizes[] = {144, 60, 45, 14};
    for (int i = 0; i < 4; ++i) {
        CAPTURE(files[i]);
        auto list = parse_url_list(testing::slurp(testing::fixture(files[i])));
        // one 301 entry carries non-ASCII letters inside its hostname
        std::size_t bad = i == 1 ? 1 : 0;
        CHECK(list.rejects.size() == bad);
        CHECK(list.records.size() + list.rejects.size() == sizes[i]);
    }
}

TEST_CASE("emitted URL lists parse back to the same records") {
    std::mt19937 rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        auto recs = some_records(rng() % 40, "t" + std::to_string(trial) + "-");
        auto back = parse_url_list(emit_url_list(recs));
        CHECK(back.rejects.empty());
        CHECK(back.records == recs);
    }
}

TEST_CASE("domain lists") {
    auto d = parse_domain_list("Blocked.IN.\nhttp://Allow.in/x 2 plain.in\n# c\nbad name\n");
    CHECK(d.domains == std::vector<std::string>{"blocked.in", "allow.in", "plain.in"});
    REQUIRE(d.rejects.size() == 1);
    CHECK(d.rejects[0].line == 4);
    auto fig = parse_domain_list(testing::slurp(testing::fixture("demo_domains.txt")));
    CHECK(fig.domains.size() == 3);
}

TEST_CASE("CSV quoting") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_field("line\nbreak") == "\"line\nbreak\"");
}

TEST_CASE("census text layout") {
    auto text = emit_census(census_counts(), Format::Text);
    CHECK(text.find("Description : Error Code") == 0);
    CHECK(text.find("Found") != std::string::npos);
    CHECK(text.find("Moved Permanently") != std::string::npos);
    CHECK(text.find("Name Not Resolved") != std::string::npos);
    auto last = text.substr(text.rfind("Grand Total"));
    std::istringstream in(last);
    std::string g, t;
    std::vector<int> nums;
    in >> g >> t;
    for (int v; in >> v;) nums.push_back(v);
    CHECK(nums == std::vector<int>{449, 186, 43, 137, 815});
    CHECK(text.find(" \n") == std::string::npos);
}

TEST_CASE("empty census and other codes") {
    auto empty = emit_census(CensusTable{}, Format::Text);
    CHECK(empty.find("Grand Total") != std::string::npos);
    CensusTable t = census_counts();
    t.add(StatusClass::other(404), 2);
    auto csv = emit_census(t, Format::Csv);
    CHECK(csv.find("404,") != std::string::npos);
    CHECK(csv.find("total,Grand Total,817") != std::string::npos);
    CHECK(parse_census_json(emit_census(t, Format::Json)) == t);
}

TEST_CASE("census JSON has every dominant key and a total") {
    auto j = json::parse(emit_census(CensusTable{}, Format::Json));
    for (const char* k : {"200", "301", "302", "0"}) CHECK(j.at(k) == 0);
    CHECK(j.at("total") == 0);
    auto full = json::parse(emit_census(census_counts(), Format::Json));
    CHECK(full.at("200") == 449);
    CHECK(full.at("total") == 815);
    CHECK(parse_census_json(full.dump()) == census_counts());
    CHECK_THROWS_AS(parse_census_json(R"({"200": 1, "total": 2})"), InputError);
    CHECK_THROWS_AS(parse_census_json("nope"), InputError);
}

TEST_CASE("allocation calculation strings") {
    CHECK(allocation_calculation(261, 449, 815, 144) == "261 * 449 / 815 = 143.79 = 144");
    CHECK(allocation_calculation(261, 186, 815, 60) == "261 * 186 / 815 = 59.56 = 60");
    CHECK(allocation_calculation(261, 137, 815, 44) == "261 * 137 / 815 = 43.87 = 44");
    CHECK(allocation_calculation(261, 43, 815, 14) == "261 * 43 / 815 = 13.77 = 14");
}

namespace {

SamplePlan sample_plan() {
    std::vector<ProbeResult> results;
    std::size_t id = 0;
    for (auto [status, count] : std::vector<std::pair<std::optional<int>, std::size_t>>{
             {200, 449}, {301, 186}, {std::nullopt, 137}, {302, 43}}) {
        for (std::size_t i = 0; i < count; ++i) {
            results.push_back(ProbeResult::make(UrlRecord::parse("http://p" + std::to_string(id++) + ".example/"),
                                                status, 0.0));
        }
    }
    SamplePlan plan;
    plan.params = {sampling::kZ95, 0.5, 0.05, 815};
    plan.size = sampling::compute_sample_size(plan.params);
    plan.seed = 7;
    plan.strata = sampling::plan_strata(results, plan.size.n, plan.seed);
    return plan;
}

}  // namespace

TEST_CASE("sample plan text and JSON") {
    auto plan = sample_plan();
    auto text = emit_sample_plan(plan, Format::Text);
    CHECK(text.find("= 384.16 = 384") != std::string::npos);
    CHECK(text.find("= 261.23 = 261") != std::string::npos);
    CHECK(text.find("261 * 449 / 815 = 143.79 = 144") != std::string::npos);
    CHECK(text.find("seed = 7") != std::string::npos);
    auto total = text.substr(text.rfind("Total"));
    CHECK(total.find("815") != std::string::npos);
    CHECK(total.find("262") != std::string::npos);

    auto js = emit_sample_plan(plan, Format::Json);
    CHECK(json::parse(js).at("total_sample") == 262);
    CHECK(parse_sample_plan_json(js) == plan);
    auto csv = emit_sample_plan(plan, Format::Csv);
    CHECK(csv.find("200,449,") != std::string::npos);
}

TEST_CASE("tampered sample plan JSON is rejected") {
    auto j = json::parse(emit_sample_plan(sample_plan(), Format::Json));
    j["strata"][0]["allocation"] = 999;
    CHECK_THROWS_AS(parse_sample_plan_json(j.dump()), InputError);
}

TEST_CASE("success tables side by side") {
    std::vector<SuccessTable> tables{
        {"tor", {{StatusClass::found302(), "tor", 93, 13, 14}, {StatusClass::ok200(), "tor", 99, 142, 144}}},
        {"opera", {{StatusClass::found302(), "opera", 100, 14, 14}, {StatusClass::ok200(), "opera", 98, 141, 144}}}};
    auto text = emit_success_tables(tables, Format::Text);
    CHECK(text.find("tor Success %") != std::string::npos);
    CHECK(text.find("opera Success %") != std::string::npos);
    CHECK(text.find("93") != std::string::npos);
    CHECK(text.find("Found") < text.find("OK"));
    CHECK(parse_success_tables_json(emit_success_tables(tables, Format::Json)) == tables);
    auto csv = emit_success_tables(tables, Format::Csv);
    CHECK(csv.find("tor") != std::string::npos);

    auto bad = json::parse(emit_success_tables(tables, Format::Json));
    bad[0]["rows"][0]["success_pct"] = 50;
    CHECK_THROWS_AS(parse_success_tables_json(bad.dump()), InputError);
}

TEST_CASE("triage summary and rows") {
    std::vector<TriageRow> rows;
    for (int i = 0; i < 24; ++i) rows.push_back({"p" + std::to_string(i) + ".in", TriageStatus::PurchasableDomain, ""});
    for (int i = 0; i < 21; ++i) rows.push_back({"n" + std::to_string(i) + ".in", TriageStatus::NoARecord, ""});
    auto counts = count_triage(rows);
    CHECK(counts == TriageCounts{24, 21, 0, 0});
    CHECK(counts.total() == 45);
    auto text = emit_triage_summary(counts, Format::Text);
    CHECK(text.find("Domain Name Available for Purchase") != std::string::npos);
    CHECK(text.find("A Records Not Found") != std::string::npos);
    CHECK(text.find("Total No of Websites") != std::string::npos);
    CHECK(text.find("Lookup Failed") == std::string::npos);
    CHECK(parse_triage_json(emit_triage(rows, Format::Json)) == rows);

    rows.push_back({"x.in", std::nullopt, "no availability data"});
    auto with_fail = emit_triage(rows, Format::Text);
    CHECK(with_fail.find("Lookup Failed") != std::string::npos);
    auto j = json::parse(emit_triage(rows, Format::Json));
    CHECK(j.at("total") == 46);
    CHECK(j.at("rows").back().at("status") == "LookupFailed");
    CHECK(parse_triage_json(j.dump()) == rows);
}

TEST_CASE("verdict rows round trip") {
    auto a = DnsObservation::make("b.in", "isp", "", {Rcode::NoError, {Ipv4::parse("198.51.100.1")}});
    auto b = DnsObservation::make("b.in", "reference", "", {Rcode::NoError, {Ipv4::parse("203.0.113.9")}});
    auto c = DnsObservation::make("m.in", "isp", "", {Rcode::NxDomain, {}});
    auto d = DnsObservation::make("m.in", "reference", "", {Rcode::NxDomain, {}});
    std::vector<VerdictRow> rows{{a, b, DnsVerdict::tampered({Ipv4::parse("198.51.100.1")})},
                                 {c, d, DnsVerdict::unresolvable_everywhere()}};
    CHECK(parse_verdicts_json(emit_verdicts(rows, Format::Json)) == rows);
    auto text = emit_verdicts(rows, Format::Text);
    CHECK(text.find("Tampered") != std::string::npos);
    CHECK(text.find("UnresolvableEverywhere") != std::string::npos);
    CHECK(emit_verdicts(rows, Format::Csv).find("b.in,") != std::string::npos);
}

TEST_CASE("trace rows round trip") {
    sim::SimNet net(sim::SimConfig::load(testing::fixture("demo.sim.json")));
    std::vector<TraceRow> rows;
    for (const char* d : {"blockedwebsite.in", "allowwebsite.in", "missing-from-zone.in"}) {
        rows.push_back(make_trace_row(d, "isp", net.end_to_end(d, "isp")));
    }
    CHECK(rows[0].outcome == PageOutcome::BlockPage);
    CHECK(parse_traces_json(emit_traces(rows, Format::Json)) == rows);
    auto text = emit_traces(rows, Format::Text);
    CHECK(text.find("DnsIntercepted") != std::string::npos);
    CHECK(text.find("BlockPage") != std::string::npos);
}

TEST_CASE("probe result JSON checks class against status") {
    auto r = ProbeResult::make(UrlRecord::parse("http://a.example/"), 301, 0.5, std::string("x"), std::nullopt);
    auto j = json_io::encode(r);
    CHECK(json_io::decode_probe_result(j) == r);
    j["class"] = "200";
    CHECK_THROWS_AS(json_io::decode_probe_result(j), InputError);
    auto blank = ProbeResult::make(UrlRecord::parse("http://a.example/"), std::nullopt, 0.0, std::nullopt, "dns");
    auto jb = json_io::encode(blank);
    CHECK(jb.at("raw_status").is_null());
    CHECK(json_io::decode_probe_result(jb) == blank);
}
