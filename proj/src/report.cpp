#include "censornet/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>

#include <json.hpp>

#include "censornet/errors.hpp"
#include "censornet/json_io.hpp"

namespace censornet::report {

using nlohmann::json;

namespace {

// Left-aligned columns separated by two spaces; trailing blanks trimmed.
class TextTable {
public:
    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    std::string render() const {
        std::vector<std::size_t> width;
        for (const auto& row : rows_) {
            if (width.size() < row.size()) width.resize(row.size(), 0);
            for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
        }
        std::string out;
        for (const auto& row : rows_) {
            std::string line;
            for (std::size_t c = 0; c < row.size(); ++c) {
                line += row[c];
                if (c + 1 < row.size()) line.append(width[c] - row[c].size() + 2, ' ');
            }
            while (!line.empty() && line.back() == ' ') line.pop_back();
            out += line;
            out += '\n';
        }
        return out;
    }

private:
    std::vector<std::vector<std::string>> rows_;
};

std::string csv_row(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) line += ',';
        line += csv_field(fields[i]);
    }
    return line + "\r\n";
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json parse_json(std::string_view text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("invalid ") + what + " JSON: " + e.what());
    }
}

bool is_integer_token(std::string_view t) {
    return !t.empty() && std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); });
}

bool is_decimal_token(std::string_view t) {
    auto dot = t.find('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 1 == t.size()) return false;
    return is_integer_token(t.substr(0, dot)) && is_integer_token(t.substr(dot + 1));
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

// "<http://a/>" -> "http://a/"
std::string unbracket(std::string s) {
    if (s.size() >= 2 && s.front() == '<' && s.back() == '>') return s.substr(1, s.size() - 2);
    return s;
}

// A run of tokens becomes one entry, unless every token already looks like a
// URL, in which case each stands alone.
void add_segment(const std::vector<std::string_view>& seg, std::vector<std::string>& entries) {
    if (seg.empty()) return;
    bool all_urls = seg.size() > 1 && std::all_of(seg.begin(), seg.end(), [](std::string_view t) {
                        return t.find("://") != std::string_view::npos;
                    });
    if (all_urls) {
        for (auto t : seg) entries.push_back(unbracket(std::string(t)));
        return;
    }
    std::string joined;
    for (auto t : seg) {
        if (!joined.empty()) joined += ' ';
        joined += t;
    }
    entries.push_back(unbracket(std::move(joined)));
}

// Two decimals, truncated rather than rounded, as in hand-worked tables
// ("261.23 = 261"); the trailing integer carries the actual rounding.
std::string fixed2(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", std::floor(x * 100.0 + 1e-9) / 100.0);
    return buf;
}

std::string answers_text(Rcode rcode, const std::set<Ipv4>& answers) {
    if (rcode != Rcode::NoError) return std::string(to_string(rcode));
    if (answers.empty()) return "NOERROR (no A)";
    std::string s;
    for (const auto& ip : answers) {
        if (!s.empty()) s += ' ';
        s += ip.to_string();
    }
    return s;
}

std::string ips_text(const std::set<Ipv4>& ips) {
    std::string s;
    for (const auto& ip : ips) {
        if (!s.empty()) s += ' ';
        s += ip.to_string();
    }
    return s;
}

}  // namespace

std::string_view to_string(Format format) {
    switch (format) {
        case Format::Text: return "text";
        case Format::Csv: return "csv";
        case Format::Json: return "json";
    }
    return "text";
}

Format parse_format(std::string_view text) {
    if (text == "text") return Format::Text;
    if (text == "csv") return Format::Csv;
    if (text == "json") return Format::Json;
    throw InputError("unknown output format '" + std::string(text) + "' (expected text, csv or json)");
}

std::string csv_field(std::string_view value) {
    if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

namespace {

// Splits text into per-line entries, dropping comments, blank lines, index
// numbers and decimal columns. Calls fn(line_no, entry) in order.
template <class Fn>
void for_each_entry(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        auto tokens = split_ws(line);
        if (!tokens.empty() && tokens.front().front() != '#') {
            std::vector<std::string> entries;
            std::vector<std::string_view> seg;
            for (auto t : tokens) {
                if (is_integer_token(t)) {
                    add_segment(seg, entries);
                    seg.clear();
                } else if (!is_decimal_token(t)) {
                    seg.push_back(t);
                }
            }
            add_segment(seg, entries);
            for (auto& entry : entries) fn(line_no, std::move(entry));
        }
        if (nl == text.size()) break;
    }
}

}  // namespace

UrlList parse_url_list(std::string_view text) {
    UrlList out;
    for_each_entry(text, [&](std::size_t line_no, std::string entry) {
        std::string why;
        if (auto rec = UrlRecord::try_parse(entry, &why)) {
            out.records.push_back(std::move(*rec));
        } else {
            out.rejects.push_back({line_no, std::move(entry), why});
        }
    });
    return out;
}

DomainList parse_domain_list(std::string_view text) {
    DomainList out;
    for_each_entry(text, [&](std::size_t line_no, std::string entry) {
        if (entry.find("://") != std::string::npos) {
            std::string why;
            if (auto rec = UrlRecord::try_parse(entry, &why)) {
                out.domains.push_back(rec->domain);
            } else {
                out.rejects.push_back({line_no, std::move(entry), why});
            }
            return;
        }
        std::string host = entry;
        std::transform(host.begin(), host.end(), host.begin(), [](unsigned char c) { return std::tolower(c); });
        if (!host.empty() && host.back() == '.') host.pop_back();
        if (is_valid_hostname(host)) {
            out.domains.push_back(std::move(host));
        } else {
            out.rejects.push_back({line_no, std::move(entry), "not a hostname or URL"});
        }
    });
    return out;
}

std::string emit_url_list(std::span<const UrlRecord> records) {
    std::string out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        out += std::to_string(i + 1) + "\t" + records[i].url + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// census

std::string emit_census(const CensusTable& census, Format format) {
    // Columns follow the code order 200, 301, 302, 0, then other codes; rows
    // are alphabetical by description with other codes after.
    std::vector<StatusClass> columns{StatusClass::ok200(), StatusClass::moved301(), StatusClass::found302(),
                                     StatusClass::blank0()};
    std::vector<StatusClass> rows{StatusClass::found302(), StatusClass::moved301(), StatusClass::blank0(),
                                  StatusClass::ok200()};
    for (const auto& [cls, n] : census.counts()) {
        if (cls.kind() == StatusClass::Kind::Other) {
            columns.push_back(cls);
            rows.push_back(cls);
        }
    }

    switch (format) {
        case Format::Json: return dump(json_io::encode(census));
        case Format::Csv: {
            std::string out = csv_row({"code", "description", "count"});
            for (const auto& cls : rows) {
                out += csv_row({cls.key(), cls.description(), std::to_string(census.count(cls))});
            }
            out += csv_row({"total", "Grand Total", std::to_string(census.total())});
            return out;
        }
        case Format::Text: break;
    }

    TextTable t;
    std::vector<std::string> header{"Description : Error Code"};
    for (const auto& c : columns) header.push_back(c.kind() == StatusClass::Kind::Blank0 ? "0 (blank)" : c.key());
    header.push_back("Grand Total");
    t.add(header);
    for (const auto& r : rows) {
        std::vector<std::string> line{r.description()};
        for (const auto& c : columns) line.push_back(c == r ? std::to_string(census.count(r)) : "");
        line.push_back(std::to_string(census.count(r)));
        t.add(line);
    }
    std::vector<std::string> total{"Grand Total"};
    for (const auto& c : columns) total.push_back(std::to_string(census.count(c)));
    total.push_back(std::to_string(census.total()));
    t.add(total);
    return t.render();
}

CensusTable parse_census_json(std::string_view text) { return json_io::decode_census(parse_json(text, "census")); }

// ---------------------------------------------------------------------------
// sample plan

std::string allocation_calculation(std::size_t n, std::size_t stratum_size, std::size_t population,
                                   std::size_t allocation) {
    double exact = population ? static_cast<double>(n) * static_cast<double>(stratum_size) / population : 0.0;
    return std::to_string(n) + " * " + std::to_string(stratum_size) + " / " + std::to_string(population) + " = " +
           fixed2(exact) + " = " + std::to_string(allocation);
}

std::string emit_sample_plan(const SamplePlan& plan, Format format) {
    std::size_t population = 0;
    std::size_t total = 0;
    for (const auto& s : plan.strata) {
        population += s.population_size;
        total += s.allocation;
    }

    switch (format) {
        case Format::Json: {
            json strata = json::array();
            for (const auto& s : plan.strata) strata.push_back(json_io::encode(s));
            return dump(json{{"params", json_io::encode(plan.params)},
                             {"size", json_io::encode(plan.size)},
                             {"seed", plan.seed},
                             {"strata", std::move(strata)},
                             {"total_sample", total}});
        }
        case Format::Csv: {
            std::string out = csv_row({"stratum", "known_population", "calculation", "sample"});
            for (const auto& s : plan.strata) {
                out += csv_row({s.label.key(), std::to_string(s.population_size),
                                allocation_calculation(plan.size.n, s.population_size, population, s.allocation),
                                std::to_string(s.allocation)});
            }
            out += csv_row({"total", std::to_string(population), "", std::to_string(total)});
            return out;
        }
        case Format::Text: break;
    }

    const auto& p = plan.params;
    std::string out;
    out += "n0 = " + fixed2(p.z) + "^2 * " + fixed2(p.p) + " * (1 - " + fixed2(p.p) + ") / " + fixed2(p.e) +
           "^2 = " + fixed2(plan.size.n0_real) + " = " + std::to_string(plan.size.n0) + "\n";
    out += "n = " + std::to_string(plan.size.n0) + " * " + std::to_string(p.population) + " / (" +
           std::to_string(plan.size.n0) + " + " + std::to_string(p.population ? p.population - 1 : 0) +
           ") = " + fixed2(plan.size.n_real) + " = " + std::to_string(plan.size.n) + "\n";
    out += "seed = " + std::to_string(plan.seed) + "\n\n";

    TextTable t;
    t.add({"Strata", "Known Population", "Calculations", "Sample"});
    for (const auto& s : plan.strata) {
        t.add({s.label.key(), std::to_string(s.population_size),
               allocation_calculation(plan.size.n, s.population_size, population, s.allocation),
               std::to_string(s.allocation)});
    }
    t.add({"Total", std::to_string(population), "", std::to_string(total)});
    return out + t.render();
}

SamplePlan parse_sample_plan_json(std::string_view text) {
    json j = parse_json(text, "sample plan");
    try {
        SamplePlan plan;
        plan.params = json_io::decode_sampling_params(j.at("params"));
        plan.size = json_io::decode_sample_size(j.at("size"));
        plan.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& s : j.at("strata")) plan.strata.push_back(json_io::decode_stratum_plan(s));
        return plan;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed sample plan: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// success tables

std::string emit_success_tables(std::span<const SuccessTable> tables, Format format) {
    for (const auto& t : tables) t.validate();

    switch (format) {
        case Format::Json: {
            json arr = json::array();
            for (const auto& t : tables) arr.push_back(json_io::encode(t));
            return dump(arr);
        }
        case Format::Csv: {
            std::string out = csv_row({"code", "description", "path", "success_pct", "numerator", "denominator"});
            for (const auto& t : tables) {
                for (const auto& r : t.rows) {
                    out += csv_row({r.stratum.key(), r.stratum.description(), r.path_label,
                                    std::to_string(r.success_pct), std::to_string(r.numerator),
                                    std::to_string(r.denominator)});
                }
            }
            return out;
        }
        case Format::Text: break;
    }

    std::vector<StatusClass> strata;
    for (const auto& t : tables) {
        for (const auto& r : t.rows) {
            if (std::find(strata.begin(), strata.end(), r.stratum) == strata.end()) strata.push_back(r.stratum);
        }
    }
    std::sort(strata.begin(), strata.end());

    TextTable text;
    std::vector<std::string> header{"Error Code", "Description"};
    for (const auto& t : tables) header.push_back(t.path_label + " Success %");
    text.add(header);
    for (const auto& s : strata) {
        std::vector<std::string> line{s.key(), s.description()};
        for (const auto& t : tables) {
            const SuccessRow* r = t.row(s);
            line.push_back(r ? std::to_string(r->success_pct) : "-");
        }
        text.add(line);
    }
    return text.render();
}

std::vector<SuccessTable> parse_success_tables_json(std::string_view text) {
    json j = parse_json(text, "success table");
    if (!j.is_array()) throw InputError("success tables JSON must be an array");
    std::vector<SuccessTable> out;
    for (const auto& t : j) out.push_back(json_io::decode_success_table(t));
    return out;
}

// ---------------------------------------------------------------------------
// triage

TriageCounts count_triage(std::span<const TriageRow> rows) {
    TriageCounts c;
    for (const auto& r : rows) {
        if (!r.status) {
            ++c.lookup_failed;
            continue;
        }
        switch (*r.status) {
            case TriageStatus::PurchasableDomain: ++c.purchasable; break;
            case TriageStatus::NoARecord: ++c.no_a_record; break;
            case TriageStatus::Resolvable: ++c.resolvable; break;
        }
    }
    return c;
}

std::string emit_triage_summary(const TriageCounts& c, Format format) {
    switch (format) {
        case Format::Json:
            return dump(json{{"PurchasableDomain", c.purchasable},
                             {"NoARecord", c.no_a_record},
                             {"Resolvable", c.resolvable},
                             {"LookupFailed", c.lookup_failed},
                             {"total", c.total()}});
        case Format::Csv:
            return csv_row({"status", "domains"}) + csv_row({"PurchasableDomain", std::to_string(c.purchasable)}) +
                   csv_row({"NoARecord", std::to_string(c.no_a_record)}) +
                   csv_row({"Resolvable", std::to_string(c.resolvable)}) +
                   csv_row({"LookupFailed", std::to_string(c.lookup_failed)}) +
                   csv_row({"total", std::to_string(c.total())});
        case Format::Text: break;
    }
    TextTable t;
    t.add({"Status of websites with blank error codes", "No. of Domains"});
    t.add({"Domain Name Available for Purchase", std::to_string(c.purchasable)});
    t.add({"A Records Not Found", std::to_string(c.no_a_record)});
    t.add({"Resolvable", std::to_string(c.resolvable)});
    if (c.lookup_failed) t.add({"Lookup Failed", std::to_string(c.lookup_failed)});
    t.add({"Total No of Websites", std::to_string(c.total())});
    return t.render();
}

std::string emit_triage(std::span<const TriageRow> rows, Format format) {
    TriageCounts c = count_triage(rows);
    auto status_text = [](const TriageRow& r) {
        return r.status ? std::string(to_string(*r.status)) : std::string("LookupFailed");
    };

    switch (format) {
        case Format::Json: {
            json arr = json::array();
            for (const auto& r : rows) {
                json row{{"domain", r.domain}, {"status", status_text(r)}};
                if (!r.error.empty()) row["error"] = r.error;
                arr.push_back(std::move(row));
            }
            return dump(json{{"rows", std::move(arr)},
                             {"counts",
                              {{"PurchasableDomain", c.purchasable},
                               {"NoARecord", c.no_a_record},
                               {"Resolvable", c.resolvable},
                               {"LookupFailed", c.lookup_failed}}},
                             {"total", c.total()}});
        }
        case Format::Csv: {
            std::string out = csv_row({"domain", "status", "error"});
            for (const auto& r : rows) out += csv_row({r.domain, status_text(r), r.error});
            return out;
        }
        case Format::Text: break;
    }

    std::string out = emit_triage_summary(c, Format::Text);
    if (!rows.empty()) {
        TextTable detail;
        for (const auto& r : rows) detail.add({r.domain, status_text(r), r.error});
        out += "\n" + detail.render();
    }
    return out;
}

std::vector<TriageRow> parse_triage_json(std::string_view text) {
    json j = parse_json(text, "triage");
    try {
        std::vector<TriageRow> out;
        for (const auto& r : j.at("rows")) {
            TriageRow row;
            row.domain = r.at("domain").get<std::string>();
            auto status = r.at("status").get<std::string>();
            if (status != "LookupFailed") row.status = parse_triage_status(status);
            if (r.contains("error")) row.error = r.at("error").get<std::string>();
            out.push_back(std::move(row));
        }
        return out;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed triage report: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// verdicts

std::string emit_verdicts(std::span<const VerdictRow> rows, Format format) {
    switch (format) {
        case Format::Json: {
            json arr = json::array();
            for (const auto& r : rows) {
                arr.push_back(json{{"domain", r.in_scope.domain},
                                   {"in_scope", json_io::encode(r.in_scope)},
                                   {"reference", json_io::encode(r.reference)},
                                   {"verdict", json_io::encode(r.verdict)}});
            }
            return dump(arr);
        }
        case Format::Csv: {
            std::string out = csv_row({"domain", "in_scope_vantage", "in_scope_rcode", "in_scope_answers",
                                       "reference_vantage", "reference_rcode", "reference_answers", "verdict",
                                       "injected"});
            for (const auto& r : rows) {
                out += csv_row({r.in_scope.domain, r.in_scope.vantage, std::string(to_string(r.in_scope.rcode)),
                                ips_text(r.in_scope.answers), r.reference.vantage,
                                std::string(to_string(r.reference.rcode)), ips_text(r.reference.answers),
                                std::string(to_string(r.verdict.kind())), ips_text(r.verdict.injected())});
            }
            return out;
        }
        case Format::Text: break;
    }

    TextTable t;
    std::string in_label = rows.empty() ? "In scope" : rows.front().in_scope.vantage;
    std::string ref_label = rows.empty() ? "Reference" : rows.front().reference.vantage;
    t.add({"Domain", in_label, ref_label, "Verdict", "Injected"});
    for (const auto& r : rows) {
        t.add({r.in_scope.domain, answers_text(r.in_scope.rcode, r.in_scope.answers),
               answers_text(r.reference.rcode, r.reference.answers), std::string(to_string(r.verdict.kind())),
               ips_text(r.verdict.injected())});
    }
    return t.render();
}

std::vector<VerdictRow> parse_verdicts_json(std::string_view text) {
    json j = parse_json(text, "verdict");
    if (!j.is_array()) throw InputError("verdict JSON must be an array");
    std::vector<VerdictRow> out;
    try {
        for (const auto& r : j) {
            out.push_back({json_io::decode_observation(r.at("in_scope")),
                           json_io::decode_observation(r.at("reference")), json_io::decode_verdict(r.at("verdict"))});
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed verdict report: ") + e.what());
    }
    return out;
}

// ---------------------------------------------------------------------------
// simulator traces

TraceRow make_trace_row(std::string domain, std::string path, const sim::EndToEnd& result) {
    return {std::move(domain), std::move(path), result.outcome, result.answer, result.status, result.events};
}

std::string emit_traces(std::span<const TraceRow> rows, Format format) {
    switch (format) {
        case Format::Json: {
            json arr = json::array();
            for (const auto& r : rows) {
                json events = json::array();
                for (const auto& e : r.events) events.push_back(sim::event_to_json(e));
                json answers = json::array();
                for (const auto& ip : r.answer.answers) answers.push_back(ip.to_string());
                arr.push_back(json{{"domain", r.domain},
                                   {"path", r.path},
                                   {"outcome", std::string(to_string(r.outcome))},
                                   {"rcode", std::string(to_string(r.answer.rcode))},
                                   {"answers", std::move(answers)},
                                   {"status", r.status ? json(*r.status) : json(nullptr)},
                                   {"events", std::move(events)}});
            }
            return dump(arr);
        }
        case Format::Csv: {
            std::string out = csv_row({"domain", "path", "seq", "kind", "detail", "outcome"});
            for (const auto& r : rows) {
                for (const auto& e : r.events) {
                    out += csv_row({r.domain, r.path, std::to_string(e.seq), std::string(sim::to_string(e.kind)),
                                    e.detail, std::string(to_string(r.outcome))});
                }
            }
            return out;
        }
        case Format::Text: break;
    }

    std::string out;
    for (const auto& r : rows) {
        out += r.domain + " via " + r.path + ": " + std::string(to_string(r.outcome));
        if (r.status) out += " (HTTP " + std::to_string(*r.status) + ")";
        out += "\n";
        TextTable t;
        for (const auto& e : r.events) {
            t.add({"  " + std::to_string(e.seq), std::string(sim::to_string(e.kind)), e.detail});
        }
        out += t.render();
    }
    return out;
}

std::vector<TraceRow> parse_traces_json(std::string_view text) {
    json j = parse_json(text, "trace");
    if (!j.is_array()) throw InputError("trace JSON must be an array");
    std::vector<TraceRow> out;
    try {
        for (const auto& r : j) {
            TraceRow row;
            row.domain = r.at("domain").get<std::string>();
            row.path = r.at("path").get<std::string>();
            row.outcome = parse_page_outcome(r.at("outcome").get<std::string>());
            row.answer.rcode = parse_rcode(r.at("rcode").get<std::string>());
            for (const auto& ip : r.at("answers")) row.answer.answers.insert(Ipv4::parse(ip.get<std::string>()));
            if (!r.at("status").is_null()) row.status = r.at("status").get<int>();
            for (const auto& e : r.at("events")) {
                row.events.push_back({e.at("seq").get<std::uint64_t>(),
                                      sim::parse_event_kind(e.at("kind").get<std::string>()),
                                      e.at("domain").get<std::string>(), e.at("detail").get<std::string>()});
            }
            out.push_back(std::move(row));
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed trace report: ") + e.what());
    }
    return out;
}

}  // namespace censornet::report
