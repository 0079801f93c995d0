#pragma once

// On-disk run archive: <store>/<run_id>/archive.json plus manifest.json
// carrying a schema version and the SHA-256 of archive.json. Both files are
// written to a temporary name and renamed into place, manifest last, so a
// reader never sees a manifest that points at a half-written archive.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "censornet/circumvention.hpp"
#include "censornet/dns_audit.hpp"
#include "censornet/model.hpp"
#include "censornet/sampling.hpp"

namespace censornet {

inline constexpr int kArchiveSchemaVersion = 1;

struct SamplingInfo {
    sampling::SamplingParams params;
    sampling::SampleSizeResult size;
    std::uint64_t seed = 0;

    bool operator==(const SamplingInfo&) const = default;
};

struct RunArchive {
    std::string run_id;
    std::string created_at;  // ISO-8601 UTC
    std::string command;
    CensusTable census;
    std::vector<ProbeResult> probe_results;
    std::optional<SamplingInfo> sampling;
    std::vector<StratumPlan> plans;
    std::vector<SuccessTable> success_tables;
    std::map<TriageStatus, std::size_t> triage_counts;
    nlohmann::json config_snapshot = nlohmann::json::object();

    /// Throws InputError when the run id is unusable as a directory name or
    /// a contained table breaks its own invariants.
    void validate() const;

    bool operator==(const RunArchive&) const = default;
};

/// Run ids are 1..128 characters of [A-Za-z0-9._-], not starting with '.'.
bool is_valid_run_id(std::string_view run_id);

nlohmann::json archive_to_json(const RunArchive& archive);
/// Throws InputError on malformed input.
RunArchive archive_from_json(const nlohmann::json& j);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

/// Writes (or replaces) the run directory; returns its path.
std::filesystem::path persist_run(const RunArchive& archive, const std::filesystem::path& store);

/// NotFoundError when the run directory or its manifest is missing;
/// IntegrityError when the manifest, checksum, or contents do not verify.
RunArchive load_run(std::string_view run_id, const std::filesystem::path& store);

/// Ids of runs with a manifest, sorted.
std::vector<std::string> list_runs(const std::filesystem::path& store);

}  // namespace censornet
