#ifndef NVSIM_DRAM_CACHE_HPP
#define NVSIM_DRAM_CACHE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "nvsim/crypto.hpp"
#include "nvsim/trace.hpp"

namespace nvsim {

struct DramConfig {
    std::uint64_t capacity_bytes = 128ULL << 20;
    std::uint32_t num_banks = 8;
    std::uint32_t associativity = 16;
    double access_latency_ns = 20.0;
    double clock_ghz = 1.0;
    bool enabled_at_start = true;

    double accessCycles() const { return access_latency_ns * clock_ghz; }
    std::uint64_t numPages() const { return capacity_bytes / kPageBytes; }
    std::uint64_t numSets() const { return numPages() / associativity; }
    void validate() const;
};

/// Page-granularity, set-associative LRU cache of pre-decrypted pages in
/// front of PCM. Write-back, write-allocate; dirty victims must be
/// pushed back through the encrypt-before-write path by the caller.
class DramCache {
  public:
    struct LookupResult {
        bool hit = false;
        double completion = 0.0;
        double latency = 0.0;
    };

    struct Victim {
        std::uint64_t page_index = 0;
        bool dirty = false;
        Page plaintext;
    };

    struct FillResult {
        double completion = 0.0;
        std::optional<Victim> victim;
    };

    explicit DramCache(const DramConfig& config);

    const DramConfig& config() const { return config_; }
    bool enabled() const { return enabled_; }
    std::uint64_t hits() const { return hits_; }
    std::uint64_t misses() const { return misses_; }

    bool resident(std::uint64_t page_index) const;

    /// Probe + (on hit) data access. Updates recency; a Write hit marks
    /// the page dirty. Throws Disabled when the cache is off.
    LookupResult lookup(std::uint64_t page_index, Op op, double now);

    /// Mutable plaintext of a resident page (nullptr when absent).
    Page* pageData(std::uint64_t page_index);

    void markDirty(std::uint64_t page_index);

    /// Inserts at MRU; evicts and returns the LRU way of a full set.
    FillResult fill(std::uint64_t page_index, const Page& plaintext,
                    bool dirty, double now);

    /// Enable/disable. Disabling returns every dirty resident page (in
    /// set/way order) and clears residency.
    std::vector<Victim> setEnabled(bool enable);

    /// Dirty resident pages without state change (shutdown residue).
    std::vector<Victim> dirtyPages() const;

    double bankBusyUntil(std::uint32_t bank) const {
        return bank_busy_[bank];
    }

  private:
    struct Way {
        std::uint64_t page_index = 0;
        Page plaintext;
        bool dirty = false;
    };

    std::uint64_t setIndex(std::uint64_t page_index) const {
        return page_index % config_.numSets();
    }
    std::uint32_t bankIndex(std::uint64_t page_index) const {
        return static_cast<std::uint32_t>(page_index % config_.num_banks);
    }
    double occupyBank(std::uint64_t page_index, double now);

    DramConfig config_;
    bool enabled_;
    std::vector<std::vector<Way>> sets_; // within a set: front = LRU
    std::vector<double> bank_busy_;
    std::uint64_t hits_ = 0;
    std::uint64_t misses_ = 0;
};

} // namespace nvsim

#endif
