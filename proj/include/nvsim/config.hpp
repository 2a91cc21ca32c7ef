#ifndef NVSIM_CONFIG_HPP
#define NVSIM_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "nvsim/engine.hpp"

namespace nvsim {

/// Stable FNV-1a hash of a document's bytes.
std::uint64_t contentDigest(std::string_view text);

/// Applies one `section.key = value` setting. Throws UnknownKey for
/// unrecognized keys and InvalidParams for unparsable values.
void applyConfigKey(SimConfig& config, const std::string& section,
                    const std::string& key, const std::string& value);

/// Parses the sectioned key/value config format into `config`
/// (on top of whatever defaults it already holds). `source_name` is
/// used in diagnostics.
void parseConfig(std::istream& input, SimConfig& config,
                 const std::string& source_name);

/// Loads a config file over defaults and returns it together with the
/// digest of the file's bytes.
struct LoadedConfig {
    SimConfig config;
    std::uint64_t digest = 0;
};
LoadedConfig loadConfigFile(const std::string& path);

struct RunReport {
    std::uint64_t config_digest = 0;
    SimStats stats;
    std::optional<Overheads> overheads;
};

/// Structured key/value report document (JSON, format_version 1).
std::string reportToJson(const RunReport& report);
RunReport reportFromJson(const std::string& text);
RunReport loadReportFile(const std::string& path);

/// Flat one-row counters table (CSV with a header row).
std::string reportToCsv(const RunReport& report);

/// Raw-NVM snapshot: ciphertext pages with their stored algorithm
/// (JSON, format_version 1).
std::string snapshotToJson(const RunArtifacts& artifacts);

struct SnapshotPage {
    std::uint64_t page_index = 0;
    Algorithm alg = Algorithm::NoneAlg;
    Page raw;
};
std::vector<SnapshotPage> snapshotFromJson(const std::string& text);
std::vector<SnapshotPage> loadSnapshotFile(const std::string& path);

} // namespace nvsim

#endif
