#include "censornet/archive.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>

#include "censornet/errors.hpp"
#include "censornet/json_io.hpp"

namespace censornet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kArchiveFile = "archive.json";
constexpr const char* kManifestFile = "manifest.json";

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IntegrityError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_atomically(const fs::path& target, const std::string& contents) {
    static std::atomic<unsigned> counter{0};
    fs::path tmp = target;
    tmp += ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << contents;
        out.flush();
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

}  // namespace

bool is_valid_run_id(std::string_view id) {
    if (id.empty() || id.size() > 128 || id.front() == '.') return false;
    for (char c : id) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                  c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

void RunArchive::validate() const {
    if (!is_valid_run_id(run_id)) throw InputError("invalid run id '" + run_id + "'");
    for (const auto& p : plans) p.validate();
    for (const auto& t : success_tables) t.validate();
    if (sampling) sampling->params.validate();
}

json archive_to_json(const RunArchive& a) {
    json probes = json::array();
    for (const auto& r : a.probe_results) probes.push_back(json_io::encode(r));
    json plans = json::array();
    for (const auto& p : a.plans) plans.push_back(json_io::encode(p));
    json tables = json::array();
    for (const auto& t : a.success_tables) tables.push_back(json_io::encode(t));
    json triage = json::object();
    for (const auto& [status, n] : a.triage_counts) triage[std::string(to_string(status))] = n;

    json j{{"run_id", a.run_id},
           {"created_at", a.created_at},
           {"command", a.command},
           {"census", json_io::encode(a.census)},
           {"probe_results", std::move(probes)},
           {"plans", std::move(plans)},
           {"success_tables", std::move(tables)},
           {"triage_counts", std::move(triage)},
           {"config_snapshot", a.config_snapshot}};
    if (a.sampling) {
        j["sampling"] = json{{"params", json_io::encode(a.sampling->params)},
                             {"size", json_io::encode(a.sampling->size)},
                             {"seed", a.sampling->seed}};
    } else {
        j["sampling"] = nullptr;
    }
    return j;
}

RunArchive archive_from_json(const json& j) {
    try {
        RunArchive a;
        a.run_id = j.at("run_id").get<std::string>();
        a.created_at = j.at("created_at").get<std::string>();
        a.command = j.at("command").get<std::string>();
        a.census = json_io::decode_census(j.at("census"));
        for (const auto& r : j.at("probe_results")) a.probe_results.push_back(json_io::decode_probe_result(r));
        for (const auto& p : j.at("plans")) a.plans.push_back(json_io::decode_stratum_plan(p));
        for (const auto& t : j.at("success_tables")) a.success_tables.push_back(json_io::decode_success_table(t));
        for (const auto& [key, n] : j.at("triage_counts").items()) {
            a.triage_counts[parse_triage_status(key)] = n.get<std::size_t>();
        }
        a.config_snapshot = j.at("config_snapshot");
        if (!j.at("sampling").is_null()) {
            const auto& s = j.at("sampling");
            a.sampling = SamplingInfo{json_io::decode_sampling_params(s.at("params")),
                                      json_io::decode_sample_size(s.at("size")), s.at("seed").get<std::uint64_t>()};
        }
        a.validate();
        return a;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed run archive: ") + e.what());
    }
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 computation failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

fs::path persist_run(const RunArchive& archive, const fs::path& store) {
    archive.validate();
    const fs::path dir = store / archive.run_id;
    fs::create_directories(dir);

    const std::string body = archive_to_json(archive).dump(2) + "\n";
    json manifest{{"schema_version", kArchiveSchemaVersion},
                  {"run_id", archive.run_id},
                  {"created_at", archive.created_at},
                  {"files", {{kArchiveFile, {{"sha256", sha256_hex(body)}, {"bytes", body.size()}}}}}};

    write_atomically(dir / kArchiveFile, body);
    write_atomically(dir / kManifestFile, manifest.dump(2) + "\n");
    return dir;
}

RunArchive load_run(std::string_view run_id, const fs::path& store) {
    if (!is_valid_run_id(run_id)) throw NotFoundError("no run '" + std::string(run_id) + "' in " + store.string());
    const fs::path dir = store / std::string(run_id);
    if (!fs::is_regular_file(dir / kManifestFile)) {
        throw NotFoundError("no run '" + std::string(run_id) + "' in " + store.string());
    }

    json manifest;
    try {
        manifest = json::parse(read_file(dir / kManifestFile));
    } catch (const json::exception&) {
        throw IntegrityError("manifest for run '" + std::string(run_id) + "' is not valid JSON");
    }

    std::string expected;
    try {
        if (manifest.at("schema_version").get<int>() != kArchiveSchemaVersion) {
            throw IntegrityError("run '" + std::string(run_id) + "' has unsupported schema version " +
                                 manifest.at("schema_version").dump());
        }
        if (manifest.at("run_id").get<std::string>() != run_id) {
            throw IntegrityError("manifest run id does not match directory '" + std::string(run_id) + "'");
        }
        expected = manifest.at("files").at(kArchiveFile).at("sha256").get<std::string>();
    } catch (const json::exception& e) {
        throw IntegrityError("manifest for run '" + std::string(run_id) + "' is malformed: " + e.what());
    }

    const std::string body = read_file(dir / kArchiveFile);
    if (sha256_hex(body) != expected) {
        throw IntegrityError("checksum mismatch for run '" + std::string(run_id) + "'");
    }

    RunArchive archive;
    try {
        archive = archive_from_json(json::parse(body));
    } catch (const json::exception&) {
        throw IntegrityError("archive for run '" + std::string(run_id) + "' is not valid JSON");
    } catch (const InputError& e) {
        throw IntegrityError(std::string("archive for run '") + std::string(run_id) + "' is invalid: " + e.what());
    }
    if (archive.run_id != run_id) throw IntegrityError("archive run id does not match '" + std::string(run_id) + "'");
    return archive;
}

std::vector<std::string> list_runs(const fs::path& store) {
    std::vector<std::string> out;
    if (!fs::is_directory(store)) return out;
    for (const auto& entry : fs::directory_iterator(store)) {
        if (entry.is_directory() && fs::is_regular_file(entry.path() / kManifestFile)) {
            out.push_back(entry.path().filename().string());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace censornet
