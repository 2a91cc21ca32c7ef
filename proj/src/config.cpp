#include "nvsim/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nvsim {

std::uint64_t contentDigest(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void badValue(const std::string& section, const std::string& key,
                           const std::string& value) {
    throw SimError(ErrorCode::InvalidParams, "bad value '" + value +
                                                 "' for " + section + "." +
                                                 key);
}

double parseDouble(const std::string& section, const std::string& key,
                   const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) badValue(section, key, value);
        return v;
    } catch (const SimError&) {
        throw;
    } catch (const std::exception&) {
        badValue(section, key, value);
    }
}

std::uint64_t parseUint(const std::string& section, const std::string& key,
                        const std::string& value) {
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(value, &pos, 0);
        if (pos != value.size()) badValue(section, key, value);
        return v;
    } catch (const SimError&) {
        throw;
    } catch (const std::exception&) {
        badValue(section, key, value);
    }
}

bool parseBool(const std::string& section, const std::string& key,
               const std::string& value) {
    if (value == "true" || value == "on" || value == "1" || value == "yes")
        return true;
    if (value == "false" || value == "off" || value == "0" || value == "no")
        return false;
    badValue(section, key, value);
}

Algorithm parseAlgorithm(const std::string& section, const std::string& key,
                         const std::string& value) {
    if (value == "none") return Algorithm::NoneAlg;
    if (value == "des") return Algorithm::DES;
    if (value == "aes") return Algorithm::AES;
    if (value == "rsa") return Algorithm::RSA;
    badValue(section, key, value);
}

/// `FRACTION LEVEL [FIRST_PAGE LAST_PAGE]...` — page bounds in any
/// C-literal base (0x hex accepted).
Phase parsePhase(const std::string& value) {
    std::istringstream fields(value);
    Phase phase;
    std::string level;
    if (!(fields >> phase.fraction >> level))
        throw SimError(ErrorCode::InvalidParams,
                       "phase needs 'FRACTION LEVEL [FIRST LAST]...': " +
                           value);
    phase.level = securityLevelFromName(level);
    std::string first_tok, last_tok;
    while (fields >> first_tok) {
        if (!(fields >> last_tok))
            throw SimError(ErrorCode::InvalidParams,
                           "phase page ranges come in FIRST LAST pairs: " +
                               value);
        PageRange range;
        range.first_page = parseUint("schedule", "phase", first_tok);
        range.last_page = parseUint("schedule", "phase", last_tok);
        if (range.last_page < range.first_page)
            throw SimError(ErrorCode::InvalidParams,
                           "phase range end before start: " + value);
        phase.page_ranges.push_back(range);
    }
    return phase;
}

} // namespace

void applyConfigKey(SimConfig& config, const std::string& section,
                    const std::string& key, const std::string& value) {
    const auto unknown = [&]() -> void {
        throw SimError(ErrorCode::UnknownKey,
                       "unknown config key " + section + "." + key);
    };

    if (section == "pcm") {
        if (key == "capacity_bytes")
            config.pcm.capacity_bytes = parseUint(section, key, value);
        else if (key == "num_banks")
            config.pcm.num_banks =
                static_cast<std::uint32_t>(parseUint(section, key, value));
        else if (key == "read_latency_ns")
            config.pcm.read_latency_ns = parseDouble(section, key, value);
        else if (key == "write_latency_ns")
            config.pcm.write_latency_ns = parseDouble(section, key, value);
        else if (key == "row_hit_latency_ns")
            config.pcm.row_hit_latency_ns = parseDouble(section, key, value);
        else
            unknown();
        return;
    }

    if (section == "dram") {
        if (key == "enabled") {
            if (parseBool(section, key, value)) {
                if (!config.dram) config.dram.emplace();
            } else {
                config.dram.reset();
            }
            return;
        }
        if (!config.dram) config.dram.emplace();
        if (key == "capacity_bytes")
            config.dram->capacity_bytes = parseUint(section, key, value);
        else if (key == "num_banks")
            config.dram->num_banks =
                static_cast<std::uint32_t>(parseUint(section, key, value));
        else if (key == "associativity")
            config.dram->associativity =
                static_cast<std::uint32_t>(parseUint(section, key, value));
        else if (key == "access_latency_ns")
            config.dram->access_latency_ns = parseDouble(section, key, value);
        else if (key == "enabled_at_start")
            config.dram->enabled_at_start = parseBool(section, key, value);
        else if (key == "flush_at_end")
            config.dram_flush_at_end = parseBool(section, key, value);
        else
            unknown();
        return;
    }

    if (section == "crypto") {
        auto& c = config.crypto;
        if (key == "des_word_cycles")
            c.per_word_cycles[1] = parseDouble(section, key, value);
        else if (key == "aes_word_cycles")
            c.per_word_cycles[2] = parseDouble(section, key, value);
        else if (key == "rsa_word_cycles")
            c.per_word_cycles[3] = parseDouble(section, key, value);
        else if (key == "des_word_energy")
            c.per_word_energy[1] = parseDouble(section, key, value);
        else if (key == "aes_word_energy")
            c.per_word_energy[2] = parseDouble(section, key, value);
        else if (key == "rsa_word_energy")
            c.per_word_energy[3] = parseDouble(section, key, value);
        else if (key == "word_bytes")
            c.word_bytes =
                static_cast<std::uint32_t>(parseUint(section, key, value));
        else if (key == "decrypt_factor")
            c.decrypt_factor = parseDouble(section, key, value);
        else
            unknown();
        return;
    }

    if (section == "policy") {
        auto& p = config.policy;
        if (key == "mode") {
            if (value == "uniform") p.mode = BankMode::Uniform;
            else if (value == "random") p.mode = BankMode::RandomPerBank;
            else if (value == "flag") p.mode = BankMode::FlagDriven;
            else badValue(section, key, value);
        } else if (key == "algorithm") {
            p.uniform_alg = parseAlgorithm(section, key, value);
        } else if (key == "flags_file") {
            p.flags_file = value;
        } else if (key == "refault_penalty_cycles") {
            p.refault_penalty_cycles = parseDouble(section, key, value);
        } else if (key == "random_des") {
            p.random_distribution[1] = parseDouble(section, key, value);
        } else if (key == "random_aes") {
            p.random_distribution[2] = parseDouble(section, key, value);
        } else if (key == "random_rsa") {
            p.random_distribution[3] = parseDouble(section, key, value);
        } else {
            unknown();
        }
        return;
    }

    if (section == "schedule") {
        auto& s = config.policy.schedule;
        if (key == "transition") {
            if (value == "keep_stronger")
                s.transition = TransitionPolicy::KeepStronger;
            else if (value == "switch_and_invalidate")
                s.transition = TransitionPolicy::SwitchAndInvalidate;
            else
                badValue(section, key, value);
        } else if (key == "phase") {
            s.phases.push_back(parsePhase(value));
        } else {
            unknown();
        }
        return;
    }

    if (section == "energy") {
        auto& e = config.energy;
        if (key == "e_pcm_read") e.e_pcm_read = parseDouble(section, key, value);
        else if (key == "e_pcm_write")
            e.e_pcm_write = parseDouble(section, key, value);
        else if (key == "e_dram_access")
            e.e_dram_access = parseDouble(section, key, value);
        else if (key == "p_background")
            e.p_background = parseDouble(section, key, value);
        else
            unknown();
        return;
    }

    if (section == "engine") {
        if (key == "clock_ghz") {
            config.clock_ghz = parseDouble(section, key, value);
            config.pcm.clock_ghz = config.clock_ghz;
            if (config.dram) config.dram->clock_ghz = config.clock_ghz;
        } else if (key == "write_buffer_pages") {
            config.write_buffer_pages =
                static_cast<std::uint32_t>(parseUint(section, key, value));
        } else if (key == "seed") {
            config.rng_seed = parseUint(section, key, value);
        } else if (key == "sleep_at_records") {
            config.sleep_at_records.clear();
            std::istringstream list(value);
            std::string tok;
            while (std::getline(list, tok, ',')) {
                tok = trim(tok);
                if (tok.empty()) continue;
                config.sleep_at_records.push_back(
                    parseUint(section, key, tok));
            }
        } else {
            unknown();
        }
        return;
    }

    throw SimError(ErrorCode::UnknownKey,
                   "unknown config section [" + section + "]");
}

void parseConfig(std::istream& input, SimConfig& config,
                 const std::string& source_name) {
    std::string line;
    std::string section;
    std::uint64_t lineno = 0;
    while (std::getline(input, line)) {
        ++lineno;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#' || text[0] == ';') continue;
        const std::string where =
            source_name + ":" + std::to_string(lineno) + ": ";
        if (text.front() == '[') {
            if (text.back() != ']' || text.size() < 3)
                throw SimError(ErrorCode::MalformedLine,
                               where + "malformed section header");
            section = trim(text.substr(1, text.size() - 2));
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw SimError(ErrorCode::MalformedLine,
                           where + "expected 'key = value'");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty())
            throw SimError(ErrorCode::MalformedLine, where + "empty key");
        if (section.empty())
            throw SimError(ErrorCode::MalformedLine,
                           where + "key before any [section]");
        try {
            applyConfigKey(config, section, key, value);
        } catch (const SimError& e) {
            throw SimError(e.code(), where + e.what());
        }
    }
}

LoadedConfig loadConfigFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw SimError(ErrorCode::IoError, "cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    LoadedConfig loaded;
    loaded.digest = contentDigest(text);
    std::istringstream stream(text);
    parseConfig(stream, loaded.config, path);
    return loaded;
}

namespace {

using nlohmann::json;

json statsToJson(const SimStats& s) {
    json j;
    j["exec_cycles"] = s.exec_cycles;
    j["pcm_reads"] = s.pcm_reads;
    j["pcm_page_writes"] = s.pcm_page_writes;
    j["row_hits"] = s.row_hits;
    j["row_misses"] = s.row_misses;
    j["dram_hits"] = s.dram_hits;
    j["dram_misses"] = s.dram_misses;
    j["wb_merges"] = s.wb_merges;
    j["wb_forced_drains"] = s.wb_forced_drains;
    j["wb_forwards"] = s.wb_forwards;
    j["encrypt_pages"] = s.encrypt_pages;
    j["decrypt_pages"] = s.decrypt_pages;
    j["endurance_total"] = s.endurance_total;
    j["endurance_max"] = s.endurance_max;
    j["invalidation_refaults"] = s.invalidation_refaults;
    j["invalidated_pages"] = s.invalidated_pages;
    j["disk_evictions"] = s.disk_evictions;
    j["dropped_dirty_rows"] = s.dropped_dirty_rows;
    j["energy_pcm"] = s.energy_pcm;
    j["energy_dram"] = s.energy_dram;
    j["energy_crypto"] = s.energy_crypto;
    j["energy_background"] = s.energy_background;
    j["total_energy"] = s.totalEnergy();
    j["avg_power"] = s.avgPower();
    j["trace_digest"] = s.trace_digest;
    j["baseline_digest"] = s.baseline_digest;
    return j;
}

SimStats statsFromJson(const json& j) {
    SimStats s;
    s.exec_cycles = j.at("exec_cycles").get<double>();
    s.pcm_reads = j.at("pcm_reads").get<std::uint64_t>();
    s.pcm_page_writes = j.at("pcm_page_writes").get<std::uint64_t>();
    s.row_hits = j.at("row_hits").get<std::uint64_t>();
    s.row_misses = j.at("row_misses").get<std::uint64_t>();
    s.dram_hits = j.at("dram_hits").get<std::uint64_t>();
    s.dram_misses = j.at("dram_misses").get<std::uint64_t>();
    s.wb_merges = j.at("wb_merges").get<std::uint64_t>();
    s.wb_forced_drains = j.at("wb_forced_drains").get<std::uint64_t>();
    s.wb_forwards = j.at("wb_forwards").get<std::uint64_t>();
    s.encrypt_pages = j.at("encrypt_pages").get<std::array<std::uint64_t, 4>>();
    s.decrypt_pages = j.at("decrypt_pages").get<std::array<std::uint64_t, 4>>();
    s.endurance_total = j.at("endurance_total").get<std::uint64_t>();
    s.endurance_max = j.at("endurance_max").get<std::uint64_t>();
    s.invalidation_refaults =
        j.at("invalidation_refaults").get<std::uint64_t>();
    s.invalidated_pages = j.at("invalidated_pages").get<std::uint64_t>();
    s.disk_evictions = j.at("disk_evictions").get<std::uint64_t>();
    s.dropped_dirty_rows = j.at("dropped_dirty_rows").get<std::uint64_t>();
    s.energy_pcm = j.at("energy_pcm").get<double>();
    s.energy_dram = j.at("energy_dram").get<double>();
    s.energy_crypto = j.at("energy_crypto").get<double>();
    s.energy_background = j.at("energy_background").get<double>();
    s.trace_digest = j.at("trace_digest").get<std::uint64_t>();
    s.baseline_digest = j.at("baseline_digest").get<std::uint64_t>();
    return s;
}

constexpr char kHexDigits[] = "0123456789abcdef";

std::string toHex(const Page& page) {
    std::string hex(kPageBytes * 2, '0');
    for (std::size_t i = 0; i < kPageBytes; ++i) {
        hex[2 * i] = kHexDigits[page.bytes[i] >> 4];
        hex[2 * i + 1] = kHexDigits[page.bytes[i] & 0xf];
    }
    return hex;
}

Page fromHex(const std::string& hex) {
    if (hex.size() != kPageBytes * 2)
        throw SimError(ErrorCode::MalformedLine,
                       "snapshot page is not 4096 bytes of hex");
    const auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw SimError(ErrorCode::MalformedLine, "bad hex digit in snapshot");
    };
    Page page;
    for (std::size_t i = 0; i < kPageBytes; ++i)
        page.bytes[i] = static_cast<std::uint8_t>(
            (nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
    return page;
}

} // namespace

std::string reportToJson(const RunReport& report) {
    json j;
    j["format_version"] = 1;
    j["config_digest"] = report.config_digest;
    j["trace_digest"] = report.stats.trace_digest;
    j["stats"] = statsToJson(report.stats);
    if (report.overheads) {
        j["overheads"]["perf_pct"] = report.overheads->perf_pct;
        j["overheads"]["power_pct"] = report.overheads->power_pct;
    }
    return j.dump(2) + "\n";
}

RunReport reportFromJson(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw SimError(ErrorCode::MalformedLine,
                       std::string("bad report document: ") + e.what());
    }
    try {
        if (j.at("format_version").get<int>() != 1)
            throw SimError(ErrorCode::InvalidParams,
                           "unsupported report format_version");
        RunReport report;
        report.config_digest = j.at("config_digest").get<std::uint64_t>();
        report.stats = statsFromJson(j.at("stats"));
        if (j.contains("overheads")) {
            Overheads ov;
            ov.perf_pct = j["overheads"].at("perf_pct").get<double>();
            ov.power_pct = j["overheads"].at("power_pct").get<double>();
            report.overheads = ov;
        }
        return report;
    } catch (const json::exception& e) {
        throw SimError(ErrorCode::MalformedLine,
                       std::string("incomplete report document: ") + e.what());
    }
}

RunReport loadReportFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw SimError(ErrorCode::IoError, "cannot open report file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return reportFromJson(buf.str());
}

std::string reportToCsv(const RunReport& report) {
    const json stats = statsToJson(report.stats);
    std::ostringstream header, row;
    header << "format_version,config_digest";
    row << 1 << ',' << report.config_digest;
    for (const auto& [key, value] : stats.items()) {
        if (value.is_array()) {
            for (std::size_t i = 0; i < value.size(); ++i) {
                header << ',' << key << '_' << i;
                row << ',' << value[i];
            }
        } else {
            header << ',' << key;
            row << ',' << value;
        }
    }
    if (report.overheads) {
        header << ",perf_overhead_pct,power_overhead_pct";
        row << ',' << report.overheads->perf_pct << ','
            << report.overheads->power_pct;
    }
    return header.str() + "\n" + row.str() + "\n";
}

std::string snapshotToJson(const RunArtifacts& artifacts) {
    json pages = json::array();
    for (const auto& [page_index, raw] : artifacts.raw_array) {
        json entry;
        entry["page_index"] = page_index;
        entry["algorithm"] = algorithmName(artifacts.stored_alg.at(page_index));
        entry["raw_hex"] = toHex(raw);
        pages.push_back(std::move(entry));
    }
    json j;
    j["format_version"] = 1;
    j["pages"] = std::move(pages);
    return j.dump() + "\n";
}

std::vector<SnapshotPage> snapshotFromJson(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw SimError(ErrorCode::MalformedLine,
                       std::string("bad snapshot document: ") + e.what());
    }
    try {
        if (j.at("format_version").get<int>() != 1)
            throw SimError(ErrorCode::InvalidParams,
                           "unsupported snapshot format_version");
        std::vector<SnapshotPage> pages;
        for (const auto& entry : j.at("pages")) {
            SnapshotPage page;
            page.page_index = entry.at("page_index").get<std::uint64_t>();
            page.alg =
                algorithmFromName(entry.at("algorithm").get<std::string>());
            page.raw = fromHex(entry.at("raw_hex").get<std::string>());
            pages.push_back(std::move(page));
        }
        return pages;
    } catch (const json::exception& e) {
        throw SimError(ErrorCode::MalformedLine,
                       std::string("incomplete snapshot document: ") +
                           e.what());
    }
}

std::vector<SnapshotPage> loadSnapshotFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw SimError(ErrorCode::IoError,
                       "cannot open snapshot file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return snapshotFromJson(buf.str());
}

} // namespace nvsim
