#include "nvsim/dram_cache.hpp"

#include <algorithm>

#include "nvsim/error.hpp"

namespace nvsim {

void DramConfig::validate() const {
    if (num_banks == 0 || associativity == 0)
        throw SimError(ErrorCode::InvalidParams,
                       "DRAM banks and associativity must be > 0");
    if (capacity_bytes % kPageBytes != 0 ||
        (capacity_bytes / kPageBytes) % associativity != 0)
        throw SimError(ErrorCode::InvalidParams,
                       "DRAM capacity must form whole sets");
    if (access_latency_ns <= 0 || clock_ghz <= 0)
        throw SimError(ErrorCode::InvalidParams,
                       "DRAM latency and clock must be > 0");
}

DramCache::DramCache(const DramConfig& config)
    : config_(config),
      enabled_(config.enabled_at_start),
      sets_(config.numSets()),
      bank_busy_(config.num_banks, 0.0) {
    config_.validate();
}

bool DramCache::resident(std::uint64_t page_index) const {
    const auto& set = sets_[setIndex(page_index)];
    return std::any_of(set.begin(), set.end(), [&](const Way& w) {
        return w.page_index == page_index;
    });
}

double DramCache::occupyBank(std::uint64_t page_index, double now) {
    double& busy = bank_busy_[bankIndex(page_index)];
    const double fin = std::max(now, busy) + config_.accessCycles();
    busy = fin;
    return fin;
}

DramCache::LookupResult DramCache::lookup(std::uint64_t page_index, Op op,
                                          double now) {
    if (!enabled_)
        throw SimError(ErrorCode::Disabled, "DRAM cache is disabled");
    auto& set = sets_[setIndex(page_index)];
    auto it = std::find_if(set.begin(), set.end(), [&](const Way& w) {
        return w.page_index == page_index;
    });

    LookupResult result;
    result.completion = occupyBank(page_index, now);
    result.latency = result.completion - now;
    if (it != set.end()) {
        result.hit = true;
        ++hits_;
        Way way = std::move(*it);
        if (op == Op::Write) way.dirty = true;
        set.erase(it);
        set.push_back(std::move(way)); // MRU
    } else {
        ++misses_;
    }
    return result;
}

Page* DramCache::pageData(std::uint64_t page_index) {
    auto& set = sets_[setIndex(page_index)];
    for (auto& w : set)
        if (w.page_index == page_index) return &w.plaintext;
    return nullptr;
}

void DramCache::markDirty(std::uint64_t page_index) {
    auto& set = sets_[setIndex(page_index)];
    for (auto& w : set)
        if (w.page_index == page_index) {
            w.dirty = true;
            return;
        }
    throw SimError(ErrorCode::PageAbsent, "markDirty on non-resident page");
}

DramCache::FillResult DramCache::fill(std::uint64_t page_index,
                                      const Page& plaintext, bool dirty,
                                      double now) {
    if (!enabled_)
        throw SimError(ErrorCode::Disabled, "DRAM cache is disabled");
    if (resident(page_index))
        throw SimError(ErrorCode::AlreadyResident,
                       "fill of already-resident page");
    auto& set = sets_[setIndex(page_index)];

    FillResult result;
    if (set.size() == config_.associativity) {
        const Way& lru = set.front();
        result.victim = Victim{lru.page_index, lru.dirty, lru.plaintext};
        set.erase(set.begin());
    }
    Way way;
    way.page_index = page_index;
    way.plaintext = plaintext;
    way.dirty = dirty;
    set.push_back(std::move(way));
    result.completion = occupyBank(page_index, now);
    return result;
}

std::vector<DramCache::Victim> DramCache::setEnabled(bool enable) {
    std::vector<Victim> flushed;
    if (enable == enabled_) return flushed;
    if (!enable) {
        flushed = dirtyPages();
        for (auto& set : sets_) set.clear();
    }
    enabled_ = enable;
    return flushed;
}

std::vector<DramCache::Victim> DramCache::dirtyPages() const {
    std::vector<Victim> dirty;
    for (const auto& set : sets_)
        for (const auto& w : set)
            if (w.dirty) dirty.push_back(Victim{w.page_index, true, w.plaintext});
    return dirty;
}

} // namespace nvsim
