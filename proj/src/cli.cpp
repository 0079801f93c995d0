#include "censornet/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "censornet/archive.hpp"
#include "censornet/circumvention.hpp"
#include "censornet/dns_audit.hpp"
#include "censornet/errors.hpp"
#include "censornet/live.hpp"
#include "censornet/prober.hpp"
#include "censornet/sampling.hpp"
#include "censornet/simnet.hpp"

extern char** environ;

namespace censornet::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Raised for operator mistakes that are not module precondition failures.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    std::istringstream in(text);
    T value{};
    in >> value;
    if (!in || !in.eof() || text.empty() || (std::is_unsigned_v<T> && text.front() == '-')) {
        throw InputError(key + ": '" + text + "' is not a valid number");
    }
    return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
    if (text == "0" || text == "false" || text == "no" || text == "off" || text.empty()) return false;
    throw InputError(key + ": '" + text + "' is not a boolean");
}

std::string utc_now_iso() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string compact_timestamp(const std::string& iso) {
    std::string s;
    for (char c : iso) {
        if (c != '-' && c != ':') s += c;
    }
    return s;
}

// What every subcommand shares after option parsing.
struct Context {
    std::ostream& out;
    std::ostream& err;
    Settings settings;
    bool live = false;
    bool live_ack = false;
};

struct RunIdentity {
    std::string run_id;
    std::string created_at;
};

// Content-addressed under --deterministic so reruns land on the same id;
// otherwise timestamped with a random suffix.
RunIdentity make_identity(const Context& ctx, const std::string& command, const std::string& digest_input) {
    if (ctx.settings.deterministic) {
        return {command + "-" + sha256_hex(command + "\n" + digest_input).substr(0, 16), kDeterministicTimestamp};
    }
    std::string now = utc_now_iso();
    std::random_device rd;
    std::ostringstream suffix;
    suffix << std::hex << (rd() & 0xFFFFFF);
    return {command + "-" + compact_timestamp(now) + "-" + suffix.str(), now};
}

void check_mode(const Context& ctx, bool sim_allowed, bool live_allowed) {
    if (ctx.live) {
        if (!live_allowed) throw UsageError("this command has no live mode");
        if (ctx.settings.sim) throw UsageError("--sim and --live are mutually exclusive");
        if (!ctx.live_ack) {
            throw UsageError(std::string("--live probes real networks; rerun with ") + kLiveAckFlag +
                             " (or CENSORNET_LIVE_ACK=1) to confirm");
        }
        return;
    }
    if (!sim_allowed) throw UsageError("this command requires --live");
    if (!ctx.settings.sim) throw UsageError("choose a network: --sim CONFIG.json or --live");
}

sim::SimConfig load_sim(const Context& ctx) {
    try {
        auto config = sim::SimConfig::load(*ctx.settings.sim);
        config.validate();
        return config;
    } catch (const InputError& e) {
        throw UsageError("invalid simulation config " + ctx.settings.sim->string() + ": " + e.what());
    }
}

ProbePolicy make_policy(const Settings& s) {
    ProbePolicy p;
    p.total_timeout = s.timeout;
    p.connect_timeout = std::min(p.connect_timeout, s.timeout);
    p.max_parallel = s.parallel;
    p.validate();
    return p;
}

FingerprintSet load_fingerprints(const Settings& s) {
    return s.fingerprints ? FingerprintSet::load(*s.fingerprints) : FingerprintSet::default_set();
}

void warn_rejects(std::ostream& err, const std::string& file, const std::vector<report::RejectedLine>& rejects) {
    for (const auto& r : rejects) {
        err << "warning: " << file << ":" << r.line << ": skipped '" << r.text << "': " << r.reason << "\n";
    }
}

std::vector<std::string> gather_domains(Context& ctx, const std::string& file, const std::vector<std::string>& names,
                                        std::string* raw_input) {
    std::vector<std::string> domains;
    std::string text;
    if (!file.empty()) {
        text = read_text(file);
        auto parsed = report::parse_domain_list(text);
        warn_rejects(ctx.err, file, parsed.rejects);
        domains = std::move(parsed.domains);
    }
    for (const auto& n : names) {
        auto parsed = report::parse_domain_list(n);
        warn_rejects(ctx.err, "--domain", parsed.rejects);
        domains.insert(domains.end(), parsed.domains.begin(), parsed.domains.end());
        text += "\n" + n;
    }
    if (domains.empty()) throw UsageError("no domains given (pass a file or --domain)");
    if (raw_input) *raw_input = text;
    return domains;
}

void archive_run(Context& ctx, const RunArchive& archive) {
    fs::path dir = persist_run(archive, ctx.settings.out);
    ctx.err << "archived run " << archive.run_id << " in " << dir.string() << "\n";
}

// --- census -----------------------------------------------------------------

struct CensusArgs {
    std::string list_file;
    std::string path = "isp";
};

int cmd_census(Context& ctx, const CensusArgs& a) {
    check_mode(ctx, true, true);
    const std::string text = read_text(a.list_file);
    auto parsed = report::parse_url_list(text);
    warn_rejects(ctx.err, a.list_file, parsed.rejects);
    if (parsed.records.empty()) throw UsageError("no URLs in " + a.list_file);

    ProbePolicy policy = make_policy(ctx.settings);
    CensusRun run;
    json snapshot = ctx.settings.snapshot();
    if (ctx.live) {
        live::HttpTransport transport;
        run = run_census(parsed.records, policy, transport);
        snapshot["mode"] = "live";
    } else {
        sim::SimNet net(load_sim(ctx));
        auto transport = net.transport(a.path);
        run = run_census(parsed.records, policy, *transport);
        snapshot["mode"] = "sim";
        snapshot["sim_sha256"] = sha256_hex(read_text(*ctx.settings.sim));
        snapshot["path"] = a.path;
    }
    snapshot["input_sha256"] = sha256_hex(text);

    RunArchive archive;
    auto id = make_identity(ctx, "census", snapshot.dump());
    archive.run_id = id.run_id;
    archive.created_at = id.created_at;
    archive.command = "census";
    archive.census = run.census;
    archive.probe_results = run.results;
    archive.config_snapshot = snapshot;
    archive_run(ctx, archive);

    ctx.out << report::emit_census(run.census, ctx.settings.format);
    return kExitOk;
}

// --- sample -----------------------------------------------------------------

struct SampleArgs {
    std::string run_id;
    double z = sampling::kZ95;
    double p = 0.5;
    double e = 0.05;
};

int cmd_sample(Context& ctx, const SampleArgs& a) {
    RunArchive source = load_run(a.run_id, ctx.settings.out);
    if (source.probe_results.empty()) throw UsageError("run " + a.run_id + " has no probe results to sample from");

    sampling::SamplingParams params{a.z, a.p, a.e, source.probe_results.size()};
    params.validate();
    auto size = sampling::compute_sample_size(params);
    auto plans = sampling::plan_strata(source.probe_results, size.n, ctx.settings.seed);

    json snapshot = ctx.settings.snapshot();
    snapshot["source_run"] = source.run_id;
    snapshot["z"] = a.z;
    snapshot["p"] = a.p;
    snapshot["e"] = a.e;

    RunArchive archive;
    auto id = make_identity(ctx, "sample", snapshot.dump());
    archive.run_id = id.run_id;
    archive.created_at = id.created_at;
    archive.command = "sample";
    archive.census = source.census;
    archive.sampling = SamplingInfo{params, size, ctx.settings.seed};
    archive.plans = plans;
    archive.config_snapshot = snapshot;
    archive_run(ctx, archive);

    ctx.out << report::emit_sample_plan({params, size, ctx.settings.seed, plans}, ctx.settings.format);
    return kExitOk;
}

// --- audit-dns --------------------------------------------------------------

struct AuditArgs {
    std::string file;
    std::vector<std::string> domains;
    std::string in_scope = "isp";
    std::string reference = "reference";
    std::string resolver;
    std::string reference_resolver;
    std::vector<std::string> block_ips;
    bool fail_on_anomaly = false;
};

int cmd_audit_dns(Context& ctx, const AuditArgs& a) {
    check_mode(ctx, true, true);
    auto domains = gather_domains(ctx, a.file, a.domains, nullptr);

    std::set<Ipv4> block_ips;
    for (const auto& ip : a.block_ips) block_ips.insert(Ipv4::parse(ip));

    std::unique_ptr<DnsPort> in_dns;
    std::unique_ptr<DnsPort> ref_dns;
    std::optional<sim::SimNet> net;
    std::string in_resolver = a.resolver;
    std::string ref_resolver = a.reference_resolver;
    if (ctx.live) {
        if (in_resolver.empty() || ref_resolver.empty()) {
            throw UsageError("live DNS audit needs --resolver and --reference-resolver");
        }
        in_dns = std::make_unique<live::UdpDnsPort>(std::min(ctx.settings.timeout, 10.0));
        ref_dns = std::make_unique<live::UdpDnsPort>(std::min(ctx.settings.timeout, 10.0));
    } else {
        net.emplace(load_sim(ctx));
        block_ips.insert(net->config().block_server_ip);
        in_dns = net->dns(a.in_scope);
        ref_dns = net->dns(a.reference);
        if (in_resolver.empty()) in_resolver = "sim:" + a.in_scope;
        if (ref_resolver.empty()) ref_resolver = "sim:" + a.reference;
    }

    std::vector<report::VerdictRow> rows;
    bool anomaly = false;
    for (const auto& d : domains) {
        auto in_obs = resolve_a(d, a.in_scope, in_resolver, *in_dns);
        auto ref_obs = resolve_a(d, a.reference, ref_resolver, *ref_dns);
        auto verdict = compare_vantages(in_obs, ref_obs, block_ips);
        if (verdict.kind() == DnsVerdict::Kind::Tampered) anomaly = true;
        rows.push_back({std::move(in_obs), std::move(ref_obs), std::move(verdict)});
    }
    ctx.out << report::emit_verdicts(rows, ctx.settings.format);
    return ctx.live && a.fail_on_anomaly && anomaly ? kExitAnomaly : kExitOk;
}

// --- circumvent -------------------------------------------------------------

struct CircumventArgs {
    std::string run_id;
    std::string direct = "isp";
    std::vector<std::string> alts;
};

struct AltSpec {
    std::string label;
    std::optional<std::string> proxy_host;
    int proxy_port = 0;
};

AltSpec parse_alt(const std::string& text, bool live) {
    AltSpec spec;
    auto eq = text.find('=');
    spec.label = text.substr(0, eq);
    if (spec.label.empty()) throw UsageError("empty --alt label in '" + text + "'");
    if (eq != std::string::npos) {
        std::string hp = text.substr(eq + 1);
        auto colon = hp.rfind(':');
        if (colon == std::string::npos) throw UsageError("--alt proxy must be host:port in '" + text + "'");
        spec.proxy_host = hp.substr(0, colon);
        spec.proxy_port = parse_number<int>("--alt port", hp.substr(colon + 1));
    }
    if (live && !spec.proxy_host) throw UsageError("live --alt needs a proxy: LABEL=HOST:PORT");
    return spec;
}

int cmd_circumvent(Context& ctx, const CircumventArgs& a) {
    check_mode(ctx, true, true);
    RunArchive source = load_run(a.run_id, ctx.settings.out);
    if (source.plans.empty()) throw UsageError("run " + a.run_id + " holds no sample plan");

    std::vector<UrlRecord> records;
    std::map<UrlRecord, StatusClass> strata;
    for (const auto& plan : source.plans) {
        for (const auto& r : plan.sample) {
            records.push_back(r);
            strata.emplace(r, plan.label);
        }
    }
    if (records.empty()) throw UsageError("run " + a.run_id + " has an empty sample");

    std::vector<AltSpec> alts;
    for (const auto& s : (a.alts.empty() ? std::vector<std::string>{"tor"} : a.alts)) {
        alts.push_back(parse_alt(s, ctx.live));
    }

    ProbePolicy policy = make_policy(ctx.settings);
    FingerprintSet fp = load_fingerprints(ctx.settings);
    std::vector<SuccessTable> tables;
    json snapshot = ctx.settings.snapshot();
    snapshot["source_run"] = source.run_id;
    snapshot["direct"] = a.direct;
    json alt_labels = json::array();
    for (const auto& alt : alts) alt_labels.push_back(alt.label);
    snapshot["alts"] = alt_labels;

    if (ctx.live) {
        live::HttpTransport direct;
        for (const auto& alt : alts) {
            live::HttpTransport via(live::HttpTransportOptions{alt.proxy_host, alt.proxy_port, {}, 0, true});
            auto results = run_circumvention(records, direct, via, fp, policy);
            tables.push_back(success_by_stratum(results, strata, alt.label));
        }
        snapshot["mode"] = "live";
    } else {
        sim::SimNet net(load_sim(ctx));
        auto direct = net.transport(a.direct);
        for (const auto& alt : alts) {
            auto via = net.transport(alt.label);
            auto results = run_circumvention(records, *direct, *via, fp, policy);
            tables.push_back(success_by_stratum(results, strata, alt.label));
        }
        snapshot["mode"] = "sim";
        snapshot["sim_sha256"] = sha256_hex(read_text(*ctx.settings.sim));
    }

    RunArchive archive;
    auto id = make_identity(ctx, "circumvent", snapshot.dump());
    archive.run_id = id.run_id;
    archive.created_at = id.created_at;
    archive.command = "circumvent";
    archive.census = source.census;
    archive.sampling = source.sampling;
    archive.plans = source.plans;
    archive.success_tables = tables;
    archive.config_snapshot = snapshot;
    archive_run(ctx, archive);

    ctx.out << report::emit_success_tables(tables, ctx.settings.format);
    return kExitOk;
}

// --- triage -----------------------------------------------------------------

struct TriageArgs {
    std::string file;
    std::vector<std::string> domains;
    std::string registry;
    std::string resolver = "8.8.8.8";
};

int cmd_triage(Context& ctx, const TriageArgs& a) {
    if (ctx.live) {
        check_mode(ctx, false, true);
    } else if (a.registry.empty()) {
        throw UsageError("triage needs --registry FIXTURE.json or --live");
    }
    std::string raw;
    auto domains = gather_domains(ctx, a.file, a.domains, &raw);

    std::unique_ptr<AvailabilityPort> avail;
    std::unique_ptr<DnsPort> dns;
    std::string resolver = a.resolver;
    json snapshot = ctx.settings.snapshot();
    if (ctx.live) {
        avail = std::make_unique<live::RdapAvailabilityPort>();
        dns = std::make_unique<live::UdpDnsPort>(std::min(ctx.settings.timeout, 10.0));
        snapshot["mode"] = "live";
        snapshot["resolver"] = resolver;
    } else {
        std::string registry_text = read_text(a.registry);
        FixtureRegistry registry = FixtureRegistry::parse(registry_text);
        avail = std::make_unique<FixtureRegistry>(registry);
        dns = std::make_unique<FixtureRegistry>(std::move(registry));
        snapshot["mode"] = "fixture";
        snapshot["registry_sha256"] = sha256_hex(registry_text);
    }
    snapshot["input_sha256"] = sha256_hex(raw);

    std::vector<report::TriageRow> rows(domains.size());
    parallel_for(domains.size(), ctx.live ? ctx.settings.parallel : 1, [&](std::size_t i) {
        rows[i].domain = domains[i];
        try {
            rows[i].status = triage_blank(domains[i], *avail, *dns, resolver);
        } catch (const LookupFailedError& e) {
            rows[i].error = e.what();
        }
    });

    auto counts = report::count_triage(rows);
    RunArchive archive;
    auto id = make_identity(ctx, "triage", snapshot.dump());
    archive.run_id = id.run_id;
    archive.created_at = id.created_at;
    archive.command = "triage";
    archive.triage_counts = {{TriageStatus::PurchasableDomain, counts.purchasable},
                             {TriageStatus::NoARecord, counts.no_a_record},
                             {TriageStatus::Resolvable, counts.resolvable}};
    archive.config_snapshot = snapshot;
    archive_run(ctx, archive);

    ctx.out << report::emit_triage(rows, ctx.settings.format);
    return kExitOk;
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
    std::string file;
    std::vector<std::string> domains;
    std::vector<std::string> paths;
};

int cmd_simulate(Context& ctx, const SimulateArgs& a) {
    check_mode(ctx, true, false);
    auto domains = gather_domains(ctx, a.file, a.domains, nullptr);
    sim::SimNet net(load_sim(ctx));
    std::vector<std::string> paths = a.paths.empty() ? std::vector<std::string>{"isp"} : a.paths;

    std::vector<report::TraceRow> rows;
    for (const auto& d : domains) {
        for (const auto& p : paths) rows.push_back(report::make_trace_row(d, p, net.end_to_end(d, p)));
    }
    ctx.out << report::emit_traces(rows, ctx.settings.format);
    return kExitOk;
}

// --- report -----------------------------------------------------------------

struct ReportArgs {
    std::string run_id;
    std::string table = "all";
    bool list = false;
};

int cmd_report(Context& ctx, const ReportArgs& a) {
    if (a.list) {
        for (const auto& id : list_runs(ctx.settings.out)) ctx.out << id << "\n";
        return kExitOk;
    }
    if (a.run_id.empty()) throw UsageError("report needs --run ID or --list");
    RunArchive run = load_run(a.run_id, ctx.settings.out);
    const auto fmt = ctx.settings.format;

    if (a.table == "all" && fmt == report::Format::Json) {
        ctx.out << archive_to_json(run).dump(2) << "\n";
        return kExitOk;
    }

    report::TriageCounts tc;
    for (const auto& [status, n] : run.triage_counts) {
        switch (status) {
            case TriageStatus::PurchasableDomain: tc.purchasable = n; break;
            case TriageStatus::NoARecord: tc.no_a_record = n; break;
            case TriageStatus::Resolvable: tc.resolvable = n; break;
        }
    }

    const bool all = a.table == "all";
    bool first = true;
    auto section = [&](const std::string& title, const std::string& body) {
        if (all && fmt == report::Format::Text) {
            ctx.out << (first ? "" : "\n") << "== " << title << " ==\n";
        }
        first = false;
        ctx.out << body;
    };
    if (a.table == "census" || (all && run.census.total() > 0)) {
        section("census", report::emit_census(run.census, fmt));
    }
    if (a.table == "plan" || (all && run.sampling)) {
        if (!run.sampling) throw UsageError("run " + a.run_id + " holds no sample plan");
        section("sample plan",
                report::emit_sample_plan({run.sampling->params, run.sampling->size, run.sampling->seed, run.plans}, fmt));
    }
    if (a.table == "success" || (all && !run.success_tables.empty())) {
        section("success", report::emit_success_tables(run.success_tables, fmt));
    }
    if (a.table == "triage" || (all && tc.total() > 0)) {
        section("triage", report::emit_triage_summary(tc, fmt));
    }
    return kExitOk;
}

void add_shared(CLI::App* sub, SettingsLayer& flags, std::string& config, bool& live, bool& ack, bool& det) {
    sub->add_option("--config", config, "JSON settings file");
    sub->add_option("--sim", flags.sim, "simulate the network from this SimConfig JSON");
    sub->add_flag("--live", live, "probe real networks");
    sub->add_flag(kLiveAckFlag, ack, "confirm --live");
    sub->add_option("--seed", flags.seed, "sampling seed");
    sub->add_option("--timeout", flags.timeout, "per-request timeout in seconds");
    sub->add_option("--parallel", flags.parallel, "requests in flight");
    sub->add_option("--format", flags.format, "text, csv or json")->check(CLI::IsMember({"text", "csv", "json"}));
    sub->add_option("--out", flags.out, "run archive directory");
    sub->add_option("--fingerprints", flags.fingerprints, "block-page fingerprint file");
    sub->add_flag("--deterministic", det, "content-addressed run ids and fixed timestamps");
}

}  // namespace

// ---------------------------------------------------------------------------

Environment process_environment() {
    Environment env;
    for (char** e = environ; e && *e; ++e) {
        std::string_view kv(*e);
        if (!kv.starts_with("CENSORNET_")) continue;
        auto eq = kv.find('=');
        if (eq == std::string_view::npos) continue;
        env.emplace(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
    }
    return env;
}

json Settings::snapshot() const {
    return json{{"seed", seed},
                {"timeout", timeout},
                {"parallel", parallel},
                {"fingerprints_sha256", fingerprints ? sha256_hex(read_text(*fingerprints)) : std::string()}};
}

SettingsLayer layer_from_json(const json& doc) {
    if (!doc.is_object()) throw InputError("settings file must hold a JSON object");
    SettingsLayer l;
    for (const auto& [key, value] : doc.items()) {
        try {
            if (key == "seed") l.seed = value.get<std::uint64_t>();
            else if (key == "timeout") l.timeout = value.get<double>();
            else if (key == "parallel") l.parallel = value.get<std::size_t>();
            else if (key == "format") l.format = value.get<std::string>();
            else if (key == "out") l.out = value.get<std::string>();
            else if (key == "sim") l.sim = value.get<std::string>();
            else if (key == "fingerprints") l.fingerprints = value.get<std::string>();
            else if (key == "deterministic") l.deterministic = value.get<bool>();
            else throw InputError("unknown setting '" + key + "'");
        } catch (const json::exception&) {
            throw InputError("setting '" + key + "' has the wrong type");
        }
    }
    return l;
}

SettingsLayer layer_from_env(const Environment& env) {
    SettingsLayer l;
    auto get = [&](const char* name) -> std::optional<std::string> {
        auto it = env.find(name);
        if (it == env.end()) return std::nullopt;
        return it->second;
    };
    if (auto v = get("CENSORNET_SEED")) l.seed = parse_number<std::uint64_t>("CENSORNET_SEED", *v);
    if (auto v = get("CENSORNET_TIMEOUT")) l.timeout = parse_number<double>("CENSORNET_TIMEOUT", *v);
    if (auto v = get("CENSORNET_PARALLEL")) l.parallel = parse_number<std::size_t>("CENSORNET_PARALLEL", *v);
    if (auto v = get("CENSORNET_FORMAT")) l.format = *v;
    if (auto v = get("CENSORNET_OUT")) l.out = *v;
    if (auto v = get("CENSORNET_SIM")) l.sim = *v;
    if (auto v = get("CENSORNET_FINGERPRINTS")) l.fingerprints = *v;
    if (auto v = get("CENSORNET_DETERMINISTIC")) l.deterministic = parse_bool("CENSORNET_DETERMINISTIC", *v);
    return l;
}

Settings merge_settings(const std::vector<SettingsLayer>& layers) {
    Settings s;
    for (const auto& l : layers) {
        if (l.seed) s.seed = *l.seed;
        if (l.timeout) s.timeout = *l.timeout;
        if (l.parallel) s.parallel = *l.parallel;
        if (l.format) s.format = report::parse_format(*l.format);
        if (l.out) s.out = *l.out;
        if (l.sim) s.sim = *l.sim;
        if (l.fingerprints) s.fingerprints = *l.fingerprints;
        if (l.deterministic) s.deterministic = *l.deterministic;
    }
    if (!(s.timeout > 0)) throw InputError("timeout must be positive");
    if (s.parallel == 0) throw InputError("parallel must be at least 1");
    if (s.out.empty()) throw InputError("archive directory must not be empty");
    return s;
}

int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err, const Environment& env) {
    CLI::App app{"Measure DNS-based web censorship: census, sampling, cross-vantage DNS audit, "
                 "circumvention success and triage of unresolvable domains.",
                 "censornet"};
    app.require_subcommand(1);

    SettingsLayer flags;
    std::string config_path;
    bool live = false;
    bool ack = false;
    bool deterministic = false;

    CensusArgs census;
    auto* c_census = app.add_subcommand("census", "probe a URL list and tabulate HTTP status classes");
    c_census->add_option("list", census.list_file, "URL list (plain or numbered layout)")->required();
    c_census->add_option("--path", census.path, "simulated path label to probe from");

    SampleArgs sample;
    auto* c_sample = app.add_subcommand("sample", "size and draw a stratified sample from a census run");
    c_sample->add_option("--run", sample.run_id, "census run id")->required();
    c_sample->add_option("--z", sample.z, "critical value (default 1.96)");
    c_sample->add_option("--p", sample.p, "expected proportion (default 0.5)");
    c_sample->add_option("--e", sample.e, "margin of error (default 0.05)");

    AuditArgs audit;
    auto* c_audit = app.add_subcommand("audit-dns", "compare A records across two vantage points");
    c_audit->add_option("domains", audit.file, "file of domains or URLs");
    c_audit->add_option("--domain", audit.domains, "domain to audit (repeatable)");
    c_audit->add_option("--in-scope", audit.in_scope, "vantage suspected of filtering");
    c_audit->add_option("--reference", audit.reference, "unfiltered reference vantage");
    c_audit->add_option("--resolver", audit.resolver, "in-scope resolver address (live)");
    c_audit->add_option("--reference-resolver", audit.reference_resolver, "reference resolver address (live)");
    c_audit->add_option("--block-ip", audit.block_ips, "known block-page server address (repeatable)");
    c_audit->add_flag("--fail-on-anomaly", audit.fail_on_anomaly, "exit 1 when tampering is found (live)");

    CircumventArgs circ;
    auto* c_circ = app.add_subcommand("circumvent", "fetch a sample over direct and alternate paths");
    c_circ->add_option("--run", circ.run_id, "sample run id")->required();
    c_circ->add_option("--direct", circ.direct, "direct path label");
    c_circ->add_option("--alt", circ.alts, "alternate path LABEL or LABEL=PROXYHOST:PORT (repeatable)");

    TriageArgs triage;
    auto* c_triage = app.add_subcommand("triage", "classify domains that returned no HTTP status");
    c_triage->add_option("domains", triage.file, "file of domains or URLs");
    c_triage->add_option("--domain", triage.domains, "domain to triage (repeatable)");
    c_triage->add_option("--registry", triage.registry, "availability/DNS fixture JSON");
    c_triage->add_option("--resolver", triage.resolver, "resolver address (live)");

    SimulateArgs simulate;
    auto* c_sim = app.add_subcommand("simulate", "trace resolution and page delivery through the simulator");
    c_sim->add_option("domains", simulate.file, "file of domains or URLs");
    c_sim->add_option("--domain", simulate.domains, "domain to trace (repeatable)");
    c_sim->add_option("--path", simulate.paths, "path label (repeatable; default isp)");

    ReportArgs rep;
    auto* c_report = app.add_subcommand("report", "print tables stored in a run archive");
    c_report->add_option("--run", rep.run_id, "run id");
    c_report->add_option("--table", rep.table, "census, plan, success, triage or all")
        ->check(CLI::IsMember({"census", "plan", "success", "triage", "all"}));
    c_report->add_flag("--list", rep.list, "list archived runs");

    for (auto* sub : {c_census, c_sample, c_audit, c_circ, c_triage, c_sim, c_report}) {
        add_shared(sub, flags, config_path, live, ack, deterministic);
    }

    std::vector<const char*> cargv;
    for (const auto& a : argv) cargv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    if (deterministic) flags.deterministic = true;

    try {
        std::vector<SettingsLayer> layers;
        if (config_path.empty()) {
            if (auto it = env.find("CENSORNET_CONFIG"); it != env.end()) config_path = it->second;
        }
        if (!config_path.empty()) {
            json doc;
            try {
                doc = json::parse(read_text(config_path));
            } catch (const json::parse_error& e) {
                throw UsageError("settings file " + config_path + " is not valid JSON: " + e.what());
            }
            layers.push_back(layer_from_json(doc));
        }
        layers.push_back(layer_from_env(env));
        layers.push_back(flags);

        Context ctx{out, err, merge_settings(layers), live, ack};
        if (auto it = env.find("CENSORNET_LIVE_ACK"); it != env.end()) {
            ctx.live_ack = ctx.live_ack || parse_bool("CENSORNET_LIVE_ACK", it->second);
        }

        if (c_census->parsed()) return cmd_census(ctx, census);
        if (c_sample->parsed()) return cmd_sample(ctx, sample);
        if (c_audit->parsed()) return cmd_audit_dns(ctx, audit);
        if (c_circ->parsed()) return cmd_circumvent(ctx, circ);
        if (c_triage->parsed()) return cmd_triage(ctx, triage);
        if (c_sim->parsed()) return cmd_simulate(ctx, simulate);
        if (c_report->parsed()) return cmd_report(ctx, rep);
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
    } catch (const NotFoundError& e) {
        err << "error: " << e.what() << "\n";
    } catch (const IntegrityError& e) {
        err << "error: " << e.what() << "\n";
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
    }
    return kExitUsage;
}

}  // namespace censornet::cli
