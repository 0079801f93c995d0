#pragma once

// Command-line front end. Settings merge in the order defaults < config file
// < CENSORNET_* environment < command-line flags.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "censornet/report.hpp"

namespace censornet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAnomaly = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kLiveAckFlag = "--i-understand-this-probes-real-networks";
inline constexpr const char* kDeterministicTimestamp = "1970-01-01T00:00:00Z";

using Environment = std::map<std::string, std::string>;

/// Snapshot of the current process environment restricted to CENSORNET_*.
Environment process_environment();

/// One source of shared settings; unset fields defer to lower layers.
struct SettingsLayer {
    std::optional<std::uint64_t> seed;
    std::optional<double> timeout;
    std::optional<std::size_t> parallel;
    std::optional<std::string> format;
    std::optional<std::string> out;
    std::optional<std::string> sim;
    std::optional<std::string> fingerprints;
    std::optional<bool> deterministic;
};

struct Settings {
    std::uint64_t seed = 1;
    double timeout = 30.0;
    std::size_t parallel = 8;
    report::Format format = report::Format::Text;
    std::filesystem::path out = "censornet-runs";
    std::optional<std::filesystem::path> sim;
    std::optional<std::filesystem::path> fingerprints;
    bool deterministic = false;

    /// The values that shape results (not where they are written), for the
    /// archive's config snapshot.
    nlohmann::json snapshot() const;
};

/// Keys: seed, timeout, parallel, format, out, sim, fingerprints,
/// deterministic. Throws InputError on unknown keys or wrong types.
SettingsLayer layer_from_json(const nlohmann::json& doc);
/// CENSORNET_SEED, CENSORNET_TIMEOUT, ... Throws InputError on bad values.
SettingsLayer layer_from_env(const Environment& env);
/// Later layers win. Throws InputError when the result is invalid.
Settings merge_settings(const std::vector<SettingsLayer>& layers_low_to_high);

/// Runs one invocation; argv[0] is the program name. Returns the exit code.
int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err,
            const Environment& env = process_environment());

}  // namespace censornet::cli
