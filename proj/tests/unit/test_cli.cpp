#include <doctest.h>

#include <json.hpp>
#include <regex>
#include <sstream>

#include "censornet/archive.hpp"
#include "censornet/cli.hpp"
#include "censornet/errors.hpp"
#include "test_support.hpp"

using namespace censornet;
using namespace censornet::cli;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args, const Environment& env = {}) {
    args.insert(args.begin(), "censornet");
    std::ostringstream out, err;
    int code = run_cli(args, out, err, env);
    return {code, out.str(), err.str()};
}

std::string fx(const std::string& name) { return testing::fixture(name).string(); }

// The run id reported on stderr after an archived command.
std::string archived_id(const std::string& err) {
    std::smatch m;
    static const std::regex re("archived run (\\S+) in");
    REQUIRE(std::regex_search(err, m, re));
    return m[1];
}

}  // namespace

TEST_CASE("help and usage errors") {
    auto help = run({"--help"});
    CHECK(help.code == kExitOk);
    CHECK(help.out.find("census") != std::string::npos);
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"bogus-command"}).code == kExitUsage);
    testing::TempDir dir;
    auto bad = run({"census", fx("urls_curated.txt"), "--sim", fx("census.sim.json"), "--format", "xml",
                    "--out", dir.path().string()});
    CHECK(bad.code == kExitUsage);
}

TEST_CASE("network mode must be chosen explicitly") {
    testing::TempDir dir;
    auto none = run({"census", fx("urls_curated.txt"), "--out", dir.path().string()});
    CHECK(none.code == kExitUsage);
    CHECK(none.err.find("--sim") != std::string::npos);
    auto unacked = run({"census", fx("urls_curated.txt"), "--live", "--out", dir.path().string()});
    CHECK(unacked.code == kExitUsage);
    CHECK(unacked.err.find(kLiveAckFlag) != std::string::npos);
    auto both = run({"census", fx("urls_curated.txt"), "--live", kLiveAckFlag, "--sim",
                     fx("census.sim.json"), "--out", dir.path().string()});
    CHECK(both.code == kExitUsage);
    CHECK(list_runs(dir.path()).empty());
}

TEST_CASE("census, sample, circumvent and report chain together") {
    testing::TempDir dir;
    const std::string out = dir.path().string();
    auto census = run({"census", fx("urls_curated.txt"), "--sim", fx("census.sim.json"), "--out", out,
                       "--deterministic"});
    REQUIRE(census.code == kExitOk);
    CHECK(std::regex_search(census.out, std::regex("Grand Total +449 +186 +43 +137 +815")));
    auto census_id = archived_id(census.err);
    auto stored = load_run(census_id, dir.path());
    CHECK(stored.census.total() == 815);
    CHECK(stored.probe_results.size() == 815);
    CHECK(stored.created_at == kDeterministicTimestamp);

    auto sample = run({"sample", "--run", census_id, "--seed", "7", "--out", out, "--deterministic"});
    REQUIRE(sample.code == kExitOk);
    CHECK(sample.out.find("261 * 449 / 815 = 143.79 = 144") != std::string::npos);
    CHECK(std::regex_search(sample.out, std::regex("Total +815 +262")));
    auto sample_id = archived_id(sample.err);

    auto circ = run({"circumvent", "--run", sample_id, "--sim", fx("census.sim.json"), "--alt", "tor", "--alt",
                     "opera", "--out", out, "--deterministic"});
    REQUIRE(circ.code == kExitOk);
    CHECK(circ.out.find("tor Success %") != std::string::npos);
    CHECK(circ.out.find("opera Success %") != std::string::npos);
    auto circ_id = archived_id(circ.err);
    CHECK(load_run(circ_id, dir.path()).success_tables.size() == 2);

    auto listing = run({"report", "--list", "--out", out});
    CHECK(listing.code == kExitOk);
    CHECK(listing.out.find(census_id) != std::string::npos);
    CHECK(listing.out.find(sample_id) != std::string::npos);

    auto table = run({"report", "--run", sample_id, "--table", "plan", "--out", out});
    CHECK(table.code == kExitOk);
    CHECK(table.out == sample.out);

    auto json_report = run({"report", "--run", census_id, "--table", "census", "--format", "json", "--out", out});
    CHECK(json::parse(json_report.out).at("total") == 815);

    CHECK(run({"report", "--run", "missing-run", "--out", out}).code == kExitUsage);
    CHECK(run({"sample", "--run", "missing-run", "--out", out}).code == kExitUsage);
}

TEST_CASE("deterministic runs are byte-identical") {
    testing::TempDir a, b;
    auto first = run({"census", fx("urls_curated.txt"), "--sim", fx("census.sim.json"), "--out",
                      a.path().string(), "--deterministic", "--format", "json"});
    auto second = run({"census", fx("urls_curated.txt"), "--sim", fx("census.sim.json"), "--out",
                       b.path().string(), "--deterministic", "--format", "json"});
    REQUIRE(first.code == kExitOk);
    CHECK(first.out == second.out);
    auto id = archived_id(first.err);
    CHECK(id == archived_id(second.err));
    CHECK(testing::slurp(a / id / "archive.json") == testing::slurp(b / id / "archive.json"));
    CHECK(testing::slurp(a / id / "manifest.json") == testing::slurp(b / id / "manifest.json"));
}

TEST_CASE("audit-dns in simulation") {
    auto r = run({"audit-dns", fx("demo_domains.txt"), "--sim", fx("demo.sim.json"), "--format", "json"});
    REQUIRE(r.code == kExitOk);
    auto j = json::parse(r.out);
    std::map<std::string, std::string> verdicts;
    for (const auto& row : j) verdicts[row.at("in_scope").at("domain")] = row.at("verdict").at("verdict");
    CHECK(verdicts["blockedwebsite.in"] == "Tampered");
    CHECK(verdicts["allowwebsite.in"] == "Consistent");
    CHECK(verdicts["missing-from-zone.in"] == "UnresolvableEverywhere");
    // anomalies only change the exit status for live runs
    auto strict = run({"audit-dns", "--domain", "blockedwebsite.in", "--sim", fx("demo.sim.json"),
                       "--fail-on-anomaly"});
    CHECK(strict.code == kExitOk);
    CHECK(run({"audit-dns", "--sim", fx("demo.sim.json")}).code == kExitUsage);
}

TEST_CASE("triage against the registry fixture") {
    testing::TempDir dir;
    auto r = run({"triage", fx("sample_blank0.tsv"), "--registry", fx("triage_registry.json"), "--sim",
                  fx("demo.sim.json"), "--out", dir.path().string()});
    REQUIRE(r.code == kExitOk);
    CHECK(std::regex_search(r.out, std::regex("Domain Name Available for Purchase +24")));
    CHECK(std::regex_search(r.out, std::regex("A Records Not Found +21")));
    CHECK(std::regex_search(r.out, std::regex("Total No of Websites +45")));
    auto stored = load_run(archived_id(r.err), dir.path());
    CHECK(stored.triage_counts.at(TriageStatus::PurchasableDomain) == 24);

    auto unknown = run({"triage", "--domain", "not-in-registry.in", "--registry", fx("triage_registry.json"),
                        "--sim", fx("demo.sim.json"), "--out", dir.path().string()});
    CHECK(unknown.code == kExitOk);
    CHECK(unknown.out.find("Lookup Failed") != std::string::npos);
}

TEST_CASE("simulate prints traces") {
    auto r = run({"simulate", "--domain", "blockedwebsite.in", "--path", "isp", "--path", "tor", "--sim",
                  fx("demo.sim.json"), "--format", "json"});
    REQUIRE(r.code == kExitOk);
    auto j = json::parse(r.out);
    REQUIRE(j.size() == 2);
    CHECK(j[0].at("outcome") == "BlockPage");
    CHECK(j[1].at("outcome") == "Content");
}

TEST_CASE("settings layers: defaults < file < environment < flags") {
    Settings d = merge_settings({});
    CHECK(d.seed == 1);
    CHECK(d.timeout == 30.0);
    CHECK(d.parallel == 8);
    CHECK(d.format == report::Format::Text);
    CHECK_FALSE(d.deterministic);

    auto file = layer_from_json(json{{"seed", 10}, {"timeout", 5}, {"parallel", 2}, {"format", "csv"}});
    auto env = layer_from_env({{"CENSORNET_SEED", "20"}, {"CENSORNET_TIMEOUT", "7.5"}});
    SettingsLayer flags;
    flags.seed = 30;
    auto s = merge_settings({file, env, flags});
    CHECK(s.seed == 30);
    CHECK(s.timeout == 7.5);
    CHECK(s.parallel == 2);
    CHECK(s.format == report::Format::Csv);
    CHECK(merge_settings({file, env}).seed == 20);
    CHECK(merge_settings({file}).seed == 10);

    CHECK_THROWS_AS(layer_from_json(json{{"sed", 1}}), InputError);
    CHECK_THROWS_AS(layer_from_json(json{{"seed", "ten"}}), InputError);
    CHECK_THROWS_AS(layer_from_env({{"CENSORNET_PARALLEL", "-1"}}), InputError);
    CHECK_THROWS_AS(layer_from_env({{"CENSORNET_DETERMINISTIC", "maybe"}}), InputError);
    SettingsLayer zero;
    zero.parallel = 0;
    CHECK_THROWS_AS(merge_settings({zero}), InputError);
}

TEST_CASE("settings layers end to end through the seed") {
    testing::TempDir dir;
    const std::string out = dir.path().string();
    auto census = run({"census", fx("urls_curated.txt"), "--sim", fx("census.sim.json"), "--out", out,
                       "--deterministic"});
    auto id = archived_id(census.err);
    auto cfg = dir / "settings.json";
    testing::spit(cfg, R"({"seed": 11})");

    auto seed_of = [&](const std::vector<std::string>& extra, const Environment& env) {
        std::vector<std::string> args{"sample", "--run", id, "--out", out};
        args.insert(args.end(), extra.begin(), extra.end());
        auto r = run(args, env);
        REQUIRE(r.code == kExitOk);
        std::smatch m;
        REQUIRE(std::regex_search(r.out, m, std::regex("seed = (\\d+)")));
        return std::stoull(m[1]);
    };
    CHECK(seed_of({}, {}) == 1);
    CHECK(seed_of({"--config", cfg.string()}, {}) == 11);
    CHECK(seed_of({}, {{"CENSORNET_CONFIG", cfg.string()}}) == 11);
    CHECK(seed_of({"--config", cfg.string()}, {{"CENSORNET_SEED", "12"}}) == 12);
    CHECK(seed_of({"--config", cfg.string(), "--seed", "13"}, {{"CENSORNET_SEED", "12"}}) == 13);

    testing::spit(cfg, R"({"colour": "blue"})");
    auto bad = run({"sample", "--run", id, "--out", out, "--config", cfg.string()});
    CHECK(bad.code == kExitUsage);
    CHECK(bad.err.find("colour") != std::string::npos);
}

TEST_CASE("empty and unreadable inputs") {
    testing::TempDir dir;
    auto empty = dir / "empty.txt";
    testing::spit(empty, "# nothing here\n");
    CHECK(run({"census", empty.string(), "--sim", fx("census.sim.json"), "--out", dir.path().string()}).code ==
          kExitUsage);
    CHECK(run({"census", (dir / "absent.txt").string(), "--sim", fx("census.sim.json"), "--out",
               dir.path().string()})
              .code == kExitUsage);
    auto badsim = dir / "bad.sim.json";
    testing::spit(badsim, R"({"intercept_mode": "nope"})");
    CHECK(run({"simulate", "--domain", "a.in", "--sim", badsim.string()}).code == kExitUsage);
}

TEST_CASE("malformed list lines are reported but do not stop the run") {
    testing::TempDir dir;
    auto r = run({"census", fx("urls_raw.txt"), "--sim", fx("census.sim.json"), "--out",
                  dir.path().string(), "--deterministic"});
    REQUIRE(r.code == kExitOk);
    CHECK(r.err.find("urls_raw.txt:19: skipped") != std::string::npos);
    CHECK(load_run(archived_id(r.err), dir.path()).census.total() == 812);
}
