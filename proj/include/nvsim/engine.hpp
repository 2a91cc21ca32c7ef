#ifndef NVSIM_ENGINE_HPP
#define NVSIM_ENGINE_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "nvsim/crypto.hpp"
#include "nvsim/dram_cache.hpp"
#include "nvsim/nvm.hpp"
#include "nvsim/policy.hpp"
#include "nvsim/trace.hpp"
#include "nvsim/write_buffer.hpp"

namespace nvsim {

struct EnergyModel {
    double e_pcm_read = 2.0;
    double e_pcm_write = 16.0;
    double e_dram_access = 1.0;
    double p_background = 0.01; // per cycle

    void validate() const;
};

struct PolicyConfig {
    BankMode mode = BankMode::Uniform;
    Algorithm uniform_alg = Algorithm::NoneAlg;
    std::array<double, 4> random_distribution{0.0, 1.0 / 3, 1.0 / 3, 1.0 / 3};
    PhaseSchedule schedule;
    std::string flags_file; // optional sidecar
    double refault_penalty_cycles = 1e6;
};

struct SimConfig {
    PcmConfig pcm;
    std::optional<DramConfig> dram;
    std::uint32_t write_buffer_pages = 8;
    PolicyConfig policy;
    CryptoCostModel crypto;
    EnergyModel energy;
    double clock_ghz = 1.0;
    std::uint64_t rng_seed = 1;
    std::vector<std::uint64_t> sleep_at_records;
    bool dram_flush_at_end = true;

    void validate() const;
    /// Digest over everything except the crypto/policy choice; used to
    /// check that overhead comparisons share a baseline.
    std::uint64_t baselineDigest() const;
};

struct SimStats {
    double exec_cycles = 0.0;
    std::uint64_t pcm_reads = 0;
    std::uint64_t pcm_page_writes = 0;
    std::uint64_t row_hits = 0;
    std::uint64_t row_misses = 0;
    std::uint64_t dram_hits = 0;
    std::uint64_t dram_misses = 0;
    std::uint64_t wb_merges = 0;
    std::uint64_t wb_forced_drains = 0;
    std::uint64_t wb_forwards = 0;
    std::array<std::uint64_t, 4> encrypt_pages{};
    std::array<std::uint64_t, 4> decrypt_pages{};
    std::uint64_t endurance_total = 0;
    std::uint64_t endurance_max = 0;
    std::uint64_t invalidation_refaults = 0;
    std::uint64_t invalidated_pages = 0;
    std::uint64_t disk_evictions = 0;
    std::uint64_t dropped_dirty_rows = 0; // dirty rows lost at power-down

    double energy_pcm = 0.0;
    double energy_dram = 0.0;
    double energy_crypto = 0.0;
    double energy_background = 0.0;

    std::uint64_t trace_digest = 0;
    std::uint64_t baseline_digest = 0;

    std::uint64_t pcmAccesses() const { return pcm_reads + pcm_page_writes; }
    double totalEnergy() const {
        return energy_pcm + energy_dram + energy_crypto + energy_background;
    }
    double avgPower() const {
        return exec_cycles > 0.0 ? totalEnergy() / exec_cycles : 0.0;
    }
    std::uint64_t totalEncrypts() const;
    std::uint64_t totalDecrypts() const;
};

struct Overheads {
    double perf_pct = 0.0;
    double power_pct = 0.0;
};

/// Device-visible memory contents recoverable after a run: the raw
/// array plus session keys and any volatile residue captured before
/// shutdown flushes.
struct RunArtifacts {
    std::map<std::uint64_t, Page> raw_array;                 // ciphertext
    std::map<std::uint64_t, Algorithm> stored_alg;
    std::map<std::uint64_t, Key128> page_keys;               // session keys
    std::map<std::uint64_t, Page> recovered_plain;           // post-flush
};

struct RunResult {
    SimStats stats;
    RunArtifacts artifacts;
};

std::uint64_t traceDigest(const Trace& trace);

/// Deterministic 64-byte payload for the i-th record writing `address`;
/// shared by the engine and the flat reference replay.
std::array<std::uint8_t, kLineBytes> writePayload(std::uint64_t record_index,
                                                  std::uint64_t address);

/// Flat reference-memory replay of the trace (the functional oracle).
std::map<std::uint64_t, Page> referenceReplay(const Trace& trace);

RunResult runSimulation(const Trace& trace, const SimConfig& config);

inline SimStats run(const Trace& trace, const SimConfig& config) {
    return runSimulation(trace, config).stats;
}

Overheads compare(const SimStats& stats, const SimStats& baseline);

/// Closed-form total for small single-bank, DRAM-off, schedule-free
/// traces; independent of the engine path.
double analyticTotal(const Trace& trace, const SimConfig& config);

double filterRate(const SimStats& enabled, const SimStats& disabled);

} // namespace nvsim

#endif
