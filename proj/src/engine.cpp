#include "nvsim/engine.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <set>

namespace nvsim {

void EnergyModel::validate() const {
    if (e_pcm_read < 0 || e_pcm_write < 0 || e_dram_access < 0 ||
        p_background < 0)
        throw SimError(ErrorCode::InvalidParams,
                       "energy parameters must be non-negative");
}

void SimConfig::validate() const {
    if (clock_ghz <= 0)
        throw SimError(ErrorCode::InvalidParams, "clock_ghz must be > 0");
    pcm.validate();
    if (dram) dram->validate();
    if (write_buffer_pages == 0)
        throw SimError(ErrorCode::InvalidParams,
                       "write buffer needs >= 1 page");
    crypto.validate();
    energy.validate();
    policy.schedule.validate();
    if (!policy.schedule.empty() && policy.mode != BankMode::FlagDriven)
        throw SimError(ErrorCode::InvalidParams,
                       "a phase schedule requires flag-driven policy mode");
}

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnvMixBits(std::uint64_t& h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (i * 8)) & 0xff;
        h *= kFnvPrime;
    }
}

template <typename T>
void fnvMix(std::uint64_t& h, T v) {
    if constexpr (std::is_floating_point_v<T>) {
        std::uint64_t bits;
        const double d = v;
        std::memcpy(&bits, &d, sizeof(bits));
        fnvMixBits(h, bits);
    } else {
        fnvMixBits(h, static_cast<std::uint64_t>(v));
    }
}

} // namespace

std::uint64_t SimConfig::baselineDigest() const {
    std::uint64_t h = kFnvOffset;
    fnvMix(h, pcm.capacity_bytes);
    fnvMix(h, pcm.num_banks);
    fnvMix(h, pcm.read_latency_ns);
    fnvMix(h, pcm.write_latency_ns);
    fnvMix(h, pcm.row_hit_latency_ns);
    fnvMix(h, clock_ghz);
    fnvMix(h, write_buffer_pages);
    fnvMix(h, dram ? 1u : 0u);
    if (dram) {
        fnvMix(h, dram->capacity_bytes);
        fnvMix(h, dram->num_banks);
        fnvMix(h, dram->associativity);
        fnvMix(h, dram->access_latency_ns);
    }
    fnvMix(h, energy.e_pcm_read);
    fnvMix(h, energy.e_pcm_write);
    fnvMix(h, energy.e_dram_access);
    fnvMix(h, energy.p_background);
    return h;
}

std::uint64_t traceDigest(const Trace& trace) {
    std::uint64_t h = kFnvOffset;
    for (const auto& rec : trace.records) {
        fnvMix(h, static_cast<std::uint64_t>(rec.op));
        fnvMix(h, rec.address);
        fnvMix(h, rec.gap_cycles);
    }
    return h;
}

std::array<std::uint8_t, kLineBytes> writePayload(std::uint64_t record_index,
                                                  std::uint64_t address) {
    std::array<std::uint8_t, kLineBytes> data;
    for (std::uint64_t w = 0; w < kLineBytes / 8; ++w) {
        const std::uint64_t v =
            mix64(record_index * 0x9e3779b97f4a7c15ULL ^ address ^ (w << 58));
        std::memcpy(data.data() + w * 8, &v, 8);
    }
    return data;
}

std::map<std::uint64_t, Page> referenceReplay(const Trace& trace) {
    std::map<std::uint64_t, Page> mem;
    for (std::uint64_t i = 0; i < trace.records.size(); ++i) {
        const auto& rec = trace.records[i];
        if (rec.op != Op::Write) continue;
        const std::uint64_t page = rec.address / kPageBytes;
        const std::uint64_t line = (rec.address % kPageBytes) / kLineBytes;
        const auto payload = writePayload(i, rec.address);
        std::memcpy(mem[page].bytes.data() + line * kLineBytes, payload.data(),
                    kLineBytes);
    }
    return mem;
}

std::uint64_t SimStats::totalEncrypts() const {
    std::uint64_t n = 0;
    for (auto v : encrypt_pages) n += v;
    return n;
}

std::uint64_t SimStats::totalDecrypts() const {
    std::uint64_t n = 0;
    for (auto v : decrypt_pages) n += v;
    return n;
}

namespace {

/// One simulation run: owns the device models and the logical timeline.
class Simulation {
  public:
    Simulation(const Trace& trace, const SimConfig& config)
        : trace_(trace),
          config_(config),
          rng_(config.rng_seed),
          pcm_(withClock(config.pcm, config.clock_ghz), config.crypto),
          wb_(config.write_buffer_pages),
          policy_(config.policy.mode, config.policy.uniform_alg,
                  config.pcm.num_banks) {
        config_.validate();
        if (config_.dram) {
            DramConfig dc = *config_.dram;
            dc.clock_ghz = config_.clock_ghz;
            dram_.emplace(dc);
        }
        policy_.setRefaultPenaltyCycles(config_.policy.refault_penalty_cycles);
        policy_.schedule() = config_.policy.schedule;
    }

    RunResult run();

  private:
    static PcmConfig withClock(PcmConfig pcm, double clock_ghz) {
        pcm.clock_ghz = clock_ghz;
        return pcm;
    }

    bool dramOn() const { return dram_ && dram_->enabled(); }

    double channelStart(double t) const {
        return dramOn() ? std::max(t, channel_busy_) : t;
    }
    void channelOccupy(double until) {
        if (dramOn()) channel_busy_ = std::max(channel_busy_, until);
    }

    void notePcmWrite(std::uint64_t page, Algorithm alg) {
        policy_.noteArrayWrite(page, alg);
    }

    /// Encrypt-before-write of a coalesced buffer entry.
    double drainEntry(WriteBuffer::Entry entry, double now) {
        const Algorithm alg = policy_.effectiveAlgorithm(entry.page_index);
        Page content = pcm_.peekPlain(keys_, entry.page_index);
        overlay(content, entry);
        const double start = channelStart(now);
        const auto out =
            pcm_.writePage(keys_, alg, entry.page_index, content, start);
        channelOccupy(out.completion);
        notePcmWrite(entry.page_index, alg);
        return out.completion;
    }

    static void overlay(Page& base, const WriteBuffer::Entry& entry) {
        for (std::uint32_t line = 0; line < kLinesPerPage; ++line)
            if (entry.lines.test(line))
                std::memcpy(base.bytes.data() + line * kLineBytes,
                            entry.data.bytes.data() + line * kLineBytes,
                            kLineBytes);
    }

    void opportunisticDrains(double now) {
        const std::uint32_t watermark = config_.write_buffer_pages / 2;
        while (wb_.size() > watermark) drainEntry(wb_.takeOldest(), now);
    }

    /// DRAM fill with wb absorption and dirty-victim writeback. Returns
    /// the fill completion.
    double fillDram(std::uint64_t page, Page content, bool dirty, double now) {
        if (wb_.hasPage(page)) {
            overlay(content, wb_.take(page));
            dirty = true;
        }
        const double start = std::max(now, channel_busy_);
        auto fill = dram_->fill(page, content, dirty, start);
        channelOccupy(fill.completion);
        if (fill.victim && fill.victim->dirty) {
            auto res =
                wb_.enqueuePage(fill.victim->page_index, fill.victim->plaintext);
            if (res.forced_drain) {
                ++stats_.wb_forced_drains;
                drainEntry(std::move(*res.forced_drain), fill.completion);
            }
        }
        return fill.completion;
    }

    double handleRead(std::uint64_t i, const AddressParts& parts, double t);
    double handleWrite(std::uint64_t i, const AddressParts& parts, double t);
    void sleepWake();
    void finish();

    const Trace& trace_;
    SimConfig config_;
    Rng rng_;
    KeyState keys_;
    PcmModel pcm_;
    std::optional<DramCache> dram_;
    WriteBuffer wb_;
    EncryptionPolicy policy_;
    std::map<std::uint64_t, Page> truth_; // disk-consistent copy for refetch
    double channel_busy_ = 0.0;
    double issue_ref_ = 0.0;
    double last_completion_ = 0.0;
    SimStats stats_;
};

double Simulation::handleRead(std::uint64_t i, const AddressParts& parts,
                              double t) {
    (void)i;
    const std::uint64_t page = parts.page_index;
    if (dramOn()) {
        if (dram_->resident(page)) {
            const double start = std::max(t, channel_busy_);
            auto res = dram_->lookup(page, Op::Read, start);
            channelOccupy(res.completion);
            return res.completion;
        }
        auto probe = dram_->lookup(page, Op::Read, t); // miss: tag probe only
        t = probe.completion;
        if (wb_.hasLine(page, parts.line_offset)) {
            ++stats_.wb_forwards;
            return t;
        }
        const Algorithm alg = policy_.effectiveAlgorithm(page);
        const double start = channelStart(t);
        auto out = pcm_.access(keys_, alg, parts.page_index * kPageBytes +
                                               parts.line_offset * kLineBytes,
                               Op::Read, start);
        channelOccupy(out.completion);
        fillDram(page, pcm_.peekPlain(keys_, page), false, out.completion);
        return out.completion;
    }

    if (wb_.hasLine(page, parts.line_offset)) {
        ++stats_.wb_forwards;
        return t;
    }
    const Algorithm alg = policy_.effectiveAlgorithm(page);
    auto out = pcm_.access(keys_, alg, parts.page_index * kPageBytes +
                                           parts.line_offset * kLineBytes,
                           Op::Read, t);
    return out.completion;
}

double Simulation::handleWrite(std::uint64_t i, const AddressParts& parts,
                               double t) {
    const std::uint64_t page = parts.page_index;
    const std::uint64_t address =
        page * kPageBytes + parts.line_offset * kLineBytes;
    const auto payload = writePayload(i, address);
    std::memcpy(truth_[page].bytes.data() + parts.line_offset * kLineBytes,
                payload.data(), kLineBytes);

    if (dramOn()) {
        if (dram_->resident(page)) {
            const double start = std::max(t, channel_busy_);
            auto res = dram_->lookup(page, Op::Write, start);
            channelOccupy(res.completion);
            std::memcpy(dram_->pageData(page)->bytes.data() +
                            parts.line_offset * kLineBytes,
                        payload.data(), kLineBytes);
            last_completion_ = std::max(last_completion_, res.completion);
            return t; // asynchronous: the issue stream does not wait
        }
        auto probe = dram_->lookup(page, Op::Write, t);
        // Write-allocate: fetch the page through the PCM read path, then
        // install it with the new line.
        const Algorithm alg = policy_.effectiveAlgorithm(page);
        const double start = channelStart(probe.completion);
        auto out = pcm_.access(keys_, alg, address, Op::Read, start);
        channelOccupy(out.completion);
        Page content = pcm_.peekPlain(keys_, page);
        if (wb_.hasPage(page)) overlay(content, wb_.take(page));
        std::memcpy(content.bytes.data() + parts.line_offset * kLineBytes,
                    payload.data(), kLineBytes);
        const double fin = fillDram(page, content, true, out.completion);
        last_completion_ = std::max(last_completion_, fin);
        return t;
    }

    auto res = wb_.enqueue(page, parts.line_offset,
                           std::span<const std::uint8_t, kLineBytes>(payload));
    if (res.merged) {
        ++stats_.wb_merges;
        return t;
    }
    if (res.forced_drain) {
        ++stats_.wb_forced_drains;
        // A forced drain stalls the issue stream until the oldest entry
        // has been written back.
        return drainEntry(std::move(*res.forced_drain), t);
    }
    return t;
}

void Simulation::sleepWake() {
    double t = issue_ref_;
    while (!wb_.empty()) t = std::max(t, drainEntry(wb_.takeOldest(), t));
    pcm_.flushRows(keys_, t);
    t = std::max(t, pcm_.maxBusy());
    pcm_.dropRows();
    keys_.enterSleep();
    keys_.wake();
    issue_ref_ = std::max(issue_ref_, t);
    last_completion_ = std::max(last_completion_, t);
}

void Simulation::finish() {
    policy_.advancePhase(1.0);
    const double t = issue_ref_;

    while (!wb_.empty()) drainEntry(wb_.takeOldest(), t);
    pcm_.flushRows(keys_, t);
    if (dram_ && config_.dram_flush_at_end) {
        for (auto& victim : dram_->setEnabled(false)) {
            const Algorithm alg =
                policy_.effectiveAlgorithm(victim.page_index);
            const double start = std::max(t, channel_busy_);
            auto out = pcm_.writePage(keys_, alg, victim.page_index,
                                      victim.plaintext, start);
            channel_busy_ = std::max(channel_busy_, out.completion);
            notePcmWrite(victim.page_index, alg);
        }
    }
}

RunResult Simulation::run() {
    keys_.boot(rng_, config_.pcm.num_banks);
    switch (config_.policy.mode) {
        case BankMode::Uniform:
            break;
        case BankMode::RandomPerBank:
            policy_.assignRandom(rng_, config_.policy.random_distribution);
            break;
        case BankMode::FlagDriven:
            if (!config_.policy.flags_file.empty())
                loadSecurityFlagsFile(config_.policy.flags_file,
                                      policy_.pageMap());
            policy_.deriveFromFlags();
            break;
    }

    std::set<std::uint64_t> sleep_points(config_.sleep_at_records.begin(),
                                         config_.sleep_at_records.end());
    const std::uint64_t n = trace_.records.size();

    for (std::uint64_t i = 0; i < n; ++i) {
        if (sleep_points.contains(i)) sleepWake();
        policy_.advancePhase(static_cast<double>(i) / static_cast<double>(n));

        const auto& rec = trace_.records[i];
        const double t_issue = issue_ref_ + static_cast<double>(rec.gap_cycles);
        opportunisticDrains(t_issue);

        const AddressParts parts = pcm_.mapAddress(rec.address);
        double t = t_issue;
        if (!policy_.pageValid(parts.page_index)) {
            const auto refault = policy_.accessInvalidPage(parts.page_index);
            t += refault.penalty_cycles;
            const Algorithm alg =
                policy_.effectiveAlgorithm(parts.page_index);
            auto truth_it = truth_.find(parts.page_index);
            pcm_.refillPage(keys_, alg, parts.page_index,
                            truth_it == truth_.end() ? Page{}
                                                     : truth_it->second);
            notePcmWrite(parts.page_index, alg);
        }

        // Reads block the issue stream until complete; writes return
        // immediately unless they stalled on a forced buffer drain.
        const double completion = rec.op == Op::Read
                                      ? handleRead(i, parts, t)
                                      : handleWrite(i, parts, t);
        last_completion_ = std::max(last_completion_, completion);
        issue_ref_ = completion;
    }

    finish();

    RunResult result;
    auto& s = stats_;
    const auto& pc = pcm_.counters();
    s.exec_cycles = std::max({issue_ref_, last_completion_, pcm_.maxBusy(),
                              channel_busy_});
    if (dram_) {
        for (std::uint32_t b = 0; b < dram_->config().num_banks; ++b)
            s.exec_cycles = std::max(s.exec_cycles, dram_->bankBusyUntil(b));
    }
    s.pcm_reads = pc.pcm_reads;
    s.pcm_page_writes = pc.array_writes;
    s.row_hits = pc.row_hits;
    s.row_misses = pc.row_misses;
    s.encrypt_pages = pc.encrypt_pages;
    s.decrypt_pages = pc.decrypt_pages;
    s.disk_evictions = pc.disk_evictions;
    if (dram_) {
        s.dram_hits = dram_->hits();
        s.dram_misses = dram_->misses();
    }
    for (const auto& [page, count] : pcm_.endurance()) {
        s.endurance_total += count;
        s.endurance_max = std::max(s.endurance_max, count);
    }
    s.invalidation_refaults = policy_.refaultCount();
    s.invalidated_pages = policy_.invalidationCount();
    s.energy_pcm = config_.energy.e_pcm_read *
                       static_cast<double>(s.pcm_reads) +
                   config_.energy.e_pcm_write *
                       static_cast<double>(s.pcm_page_writes);
    s.energy_dram = config_.energy.e_dram_access *
                    static_cast<double>(s.dram_hits + s.dram_misses);
    s.energy_crypto = pc.crypto_energy;
    s.energy_background = config_.energy.p_background * s.exec_cycles;
    s.trace_digest = traceDigest(trace_);
    s.baseline_digest = config_.baselineDigest();

    // Capture the attacker/recovery view before keys are erased.
    result.artifacts.raw_array = pcm_.dumpRaw();
    for (const auto& [page, ct] : result.artifacts.raw_array) {
        const std::uint32_t bank =
            static_cast<std::uint32_t>(page % config_.pcm.num_banks);
        const Algorithm alg = *pcm_.storedAlgorithm(page);
        result.artifacts.stored_alg[page] = alg;
        result.artifacts.page_keys[page] = keys_.bankKey(bank);
        result.artifacts.recovered_plain[page] =
            decryptPage(ct, keys_.bankKey(bank), page, alg);
    }

    pcm_.dropRows();
    keys_.powerDown();

    result.stats = s;
    return result;
}

} // namespace

RunResult runSimulation(const Trace& trace, const SimConfig& config) {
    Simulation sim(trace, config);
    return sim.run();
}

Overheads compare(const SimStats& stats, const SimStats& baseline) {
    if (stats.trace_digest != baseline.trace_digest)
        throw SimError(ErrorCode::MismatchedBaseline,
                       "runs were produced from different traces");
    if (baseline.exec_cycles <= 0.0)
        throw SimError(ErrorCode::MismatchedBaseline,
                       "baseline has zero execution time");
    Overheads ov;
    ov.perf_pct = 100.0 * (stats.exec_cycles - baseline.exec_cycles) /
                  baseline.exec_cycles;
    const double base_power = baseline.avgPower();
    ov.power_pct = base_power > 0.0
                       ? 100.0 * (stats.avgPower() - base_power) / base_power
                       : 0.0;
    return ov;
}

double filterRate(const SimStats& enabled, const SimStats& disabled) {
    if (enabled.trace_digest != disabled.trace_digest)
        throw SimError(ErrorCode::MismatchedBaseline,
                       "runs were produced from different traces");
    if (disabled.pcmAccesses() == 0)
        throw SimError(ErrorCode::MismatchedBaseline,
                       "no PCM accesses in the reference run");
    return 1.0 - static_cast<double>(enabled.pcmAccesses()) /
                     static_cast<double>(disabled.pcmAccesses());
}

double analyticTotal(const Trace& trace, const SimConfig& config) {
    config.validate();
    if (trace.records.size() > 1000)
        throw SimError(ErrorCode::UnsupportedShape, "trace too long");
    if (config.dram && config.dram->enabled_at_start)
        throw SimError(ErrorCode::UnsupportedShape, "DRAM must be disabled");
    if (!config.policy.schedule.empty() ||
        config.policy.mode != BankMode::Uniform)
        throw SimError(ErrorCode::UnsupportedShape,
                       "only uniform schedule-free policies supported");
    if (!config.sleep_at_records.empty())
        throw SimError(ErrorCode::UnsupportedShape, "no sleep events");

    std::optional<std::uint32_t> the_bank;
    for (const auto& rec : trace.records) {
        const std::uint32_t bank = static_cast<std::uint32_t>(
            (rec.address / kPageBytes) % config.pcm.num_banks);
        if (the_bank && *the_bank != bank)
            throw SimError(ErrorCode::UnsupportedShape,
                           "trace touches more than one bank");
        the_bank = bank;
    }

    const Algorithm alg = config.policy.uniform_alg;
    const double enc =
        pageCryptoCycles(config.crypto, alg, kPageBytes, CryptoDir::Encrypt);
    const double dec =
        pageCryptoCycles(config.crypto, alg, kPageBytes, CryptoDir::Decrypt);
    PcmConfig pcm = config.pcm;
    pcm.clock_ghz = config.clock_ghz;

    const std::uint32_t watermark = config.write_buffer_pages / 2;
    double issue_ref = 0.0;
    double bank_busy = 0.0;
    std::optional<std::uint64_t> open_page;
    struct WbEntry {
        std::uint64_t page;
        std::set<std::uint32_t> lines;
    };
    std::deque<WbEntry> wb;

    const auto wbFind = [&](std::uint64_t page) -> WbEntry* {
        for (auto& e : wb)
            if (e.page == page) return &e;
        return nullptr;
    };
    const auto drainOldest = [&](double now) {
        const WbEntry e = wb.front();
        wb.pop_front();
        const double fin = std::max(now, bank_busy) + enc + pcm.writeCycles();
        bank_busy = fin;
        (void)e;
        return fin;
    };

    for (const auto& rec : trace.records) {
        const double t_issue = issue_ref + static_cast<double>(rec.gap_cycles);
        while (wb.size() > watermark) drainOldest(t_issue);

        const std::uint64_t page = rec.address / kPageBytes;
        const std::uint32_t line =
            static_cast<std::uint32_t>((rec.address % kPageBytes) / kLineBytes);
        if (rec.op == Op::Read) {
            WbEntry* e = wbFind(page);
            if (e && e->lines.contains(line)) {
                issue_ref = t_issue; // forwarded from the buffer
                continue;
            }
            double t = std::max(t_issue, bank_busy);
            if (open_page && *open_page == page) {
                t += pcm.rowHitCycles();
            } else {
                t += pcm.readCycles() + dec;
                open_page = page;
            }
            bank_busy = t;
            issue_ref = t;
        } else {
            if (WbEntry* e = wbFind(page)) {
                e->lines.insert(line);
                issue_ref = t_issue;
                continue;
            }
            double stall = t_issue;
            if (wb.size() == config.write_buffer_pages)
                stall = drainOldest(t_issue);
            wb.push_back(WbEntry{page, {line}});
            issue_ref = stall;
        }
    }

    while (!wb.empty()) drainOldest(issue_ref);
    return std::max(issue_ref, bank_busy);
}

} // namespace nvsim
