#ifndef NVSIM_NVM_HPP
#define NVSIM_NVM_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "nvsim/crypto.hpp"
#include "nvsim/trace.hpp"

namespace nvsim {

struct PcmConfig {
    std::uint64_t capacity_bytes = 4ULL << 30;
    std::uint32_t num_banks = 4;
    double read_latency_ns = 50.0;
    double write_latency_ns = 1000.0;
    double row_hit_latency_ns = 10.0;
    double clock_ghz = 1.0;

    double readCycles() const { return read_latency_ns * clock_ghz; }
    double writeCycles() const { return write_latency_ns * clock_ghz; }
    double rowHitCycles() const { return row_hit_latency_ns * clock_ghz; }
    std::uint64_t numPages() const { return capacity_bytes / kPageBytes; }
    void validate() const;
};

struct AddressParts {
    std::uint64_t page_index;
    std::uint32_t bank_index;
    std::uint32_t line_offset;
};

struct AccessOutcome {
    double completion = 0.0; // absolute cycle the access finishes
    double latency = 0.0;    // completion - request time (incl. queueing)
    bool row_hit = false;
    std::uint32_t decrypts = 0;
    std::uint32_t encrypts = 0;
    std::uint32_t array_writes = 0;
};

struct FlushOutcome {
    std::uint64_t array_writes = 0;
    std::uint64_t encrypts = 0;
};

struct EvictOutcome {
    double latency_cycles = 0.0;
    std::uint32_t decrypts = 0;
};

/// Event counters accumulated by the PCM model; per-algorithm crypto
/// counts index by static_cast<int>(Algorithm).
struct PcmCounters {
    std::uint64_t pcm_reads = 0;       // line reads serviced (hit or fill)
    std::uint64_t row_hits = 0;
    std::uint64_t row_misses = 0;
    std::uint64_t array_writes = 0;    // page writes to the array
    std::uint64_t disk_evictions = 0;
    std::array<std::uint64_t, 4> encrypt_pages{};
    std::array<std::uint64_t, 4> decrypt_pages{};
    double crypto_cycles = 0.0;
    double crypto_energy = 0.0;
};

/// PCM main memory: per-bank single open-row buffers with decrypt-once
/// fill and re-encrypt-on-writeback, endurance counters, and a raw
/// ciphertext array an offline attacker can dump.
class PcmModel {
  public:
    PcmModel(const PcmConfig& config, const CryptoCostModel& costs);

    const PcmConfig& config() const { return config_; }
    const PcmCounters& counters() const { return counters_; }
    const std::map<std::uint64_t, std::uint64_t>& endurance() const {
        return endurance_;
    }

    AddressParts mapAddress(std::uint64_t address) const;

    /// Line access through the row buffer. `alg` is the page's effective
    /// algorithm from the policy view.
    AccessOutcome access(const KeyState& keys, Algorithm alg,
                         std::uint64_t line_address, Op op, double now);

    /// Encrypt-before-write of a whole page, bypassing the row buffer.
    /// Refreshes the open row if it holds this page.
    AccessOutcome writePage(const KeyState& keys, Algorithm alg,
                            std::uint64_t page_index, const Page& plaintext,
                            double now);

    FlushOutcome flushRows(const KeyState& keys, double now);

    /// Refault refill: stores a refetched page (counting the write and
    /// its crypto) with the latency already covered by the refault
    /// penalty, so no bank time is occupied.
    void refillPage(const KeyState& keys, Algorithm alg,
                    std::uint64_t page_index, const Page& plaintext);

    /// Drops row-buffer contents without writeback (volatile latches;
    /// used on sleep after an explicit flush, and on power loss).
    void dropRows();

    EvictOutcome evictToDisk(const KeyState& keys, Algorithm alg,
                             std::uint64_t page_index, double now);

    /// Offline attacker view: raw array contents, no keys required.
    std::map<std::uint64_t, Page> dumpRaw() const;

    /// Algorithm recorded at the page's last array write.
    std::optional<Algorithm> storedAlgorithm(std::uint64_t page_index) const;

    /// Functional view of a page's current plaintext (open row if newer,
    /// else decrypted array content, else a zero page). Model
    /// bookkeeping only; charges no crypto events.
    Page peekPlain(const KeyState& keys, std::uint64_t page_index) const;

    double bankBusyUntil(std::uint32_t bank) const {
        return banks_[bank].busy_until;
    }
    std::optional<std::uint64_t> openPage(std::uint32_t bank) const {
        return banks_[bank].open_page;
    }
    double maxBusy() const;

  private:
    struct Bank {
        std::optional<std::uint64_t> open_page;
        Page row_plaintext;
        Algorithm row_alg = Algorithm::NoneAlg;
        bool dirty = false;
        double busy_until = 0.0;
    };

    struct StoredPage {
        Page ciphertext;
        Algorithm alg = Algorithm::NoneAlg;
    };

    double chargeCrypto(Algorithm alg, CryptoDir dir);
    void storeToArray(const KeyState& keys, std::uint64_t page_index,
                      const Page& plaintext, Algorithm alg);

    PcmConfig config_;
    CryptoCostModel costs_;
    std::vector<Bank> banks_;
    std::map<std::uint64_t, StoredPage> array_;
    std::map<std::uint64_t, std::uint64_t> endurance_;
    PcmCounters counters_;
};

} // namespace nvsim

#endif
