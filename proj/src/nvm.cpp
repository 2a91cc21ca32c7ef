#include "nvsim/nvm.hpp"

#include <algorithm>

namespace nvsim {

void PcmConfig::validate() const {
    if (num_banks == 0)
        throw SimError(ErrorCode::InvalidParams, "num_banks must be > 0");
    if (capacity_bytes % (kPageBytes * num_banks) != 0)
        throw SimError(ErrorCode::InvalidParams,
                       "capacity must be a multiple of page_bytes * num_banks");
    if (read_latency_ns <= 0 || write_latency_ns <= 0 ||
        row_hit_latency_ns <= 0 || clock_ghz <= 0)
        throw SimError(ErrorCode::InvalidParams,
                       "PCM latencies and clock must be > 0");
}

PcmModel::PcmModel(const PcmConfig& config, const CryptoCostModel& costs)
    : config_(config), costs_(costs), banks_(config.num_banks) {
    config_.validate();
    costs_.validate();
}

AddressParts PcmModel::mapAddress(std::uint64_t address) const {
    if (address >= config_.capacity_bytes)
        throw SimError(ErrorCode::OutOfRange, "address beyond PCM capacity");
    AddressParts parts;
    parts.page_index = address / kPageBytes;
    parts.bank_index =
        static_cast<std::uint32_t>(parts.page_index % config_.num_banks);
    parts.line_offset =
        static_cast<std::uint32_t>((address % kPageBytes) / kLineBytes);
    return parts;
}

double PcmModel::chargeCrypto(Algorithm alg, CryptoDir dir) {
    if (alg == Algorithm::NoneAlg) return 0.0;
    const double cycles = pageCryptoCycles(costs_, alg, kPageBytes, dir);
    counters_.crypto_cycles += cycles;
    counters_.crypto_energy += pageCryptoEnergy(costs_, alg, kPageBytes);
    if (dir == CryptoDir::Encrypt)
        ++counters_.encrypt_pages[static_cast<int>(alg)];
    else
        ++counters_.decrypt_pages[static_cast<int>(alg)];
    return cycles;
}

void PcmModel::storeToArray(const KeyState& keys, std::uint64_t page_index,
                            const Page& plaintext, Algorithm alg) {
    const std::uint32_t bank =
        static_cast<std::uint32_t>(page_index % config_.num_banks);
    StoredPage stored;
    stored.alg = alg;
    stored.ciphertext =
        encryptPage(plaintext, keys.bankKey(bank), page_index, alg);
    array_[page_index] = stored;
    ++endurance_[page_index];
    ++counters_.array_writes;
}

AccessOutcome PcmModel::access(const KeyState& keys, Algorithm alg,
                               std::uint64_t line_address, Op op, double now) {
    keys.requireActive();
    const AddressParts parts = mapAddress(line_address);
    Bank& bank = banks_[parts.bank_index];

    AccessOutcome out;
    double t = std::max(now, bank.busy_until);

    ++counters_.pcm_reads;
    if (bank.open_page && *bank.open_page == parts.page_index) {
        out.row_hit = true;
        ++counters_.row_hits;
        t += config_.rowHitCycles();
    } else {
        ++counters_.row_misses;
        if (bank.open_page && bank.dirty) {
            // Serialize the dirty writeback before the new fill.
            t += chargeCrypto(bank.row_alg, CryptoDir::Encrypt);
            t += config_.writeCycles();
            storeToArray(keys, *bank.open_page, bank.row_plaintext,
                         bank.row_alg);
            if (bank.row_alg != Algorithm::NoneAlg) ++out.encrypts;
            ++out.array_writes;
        }
        t += config_.readCycles();
        t += chargeCrypto(alg, CryptoDir::Decrypt);
        if (alg != Algorithm::NoneAlg) ++out.decrypts;
        const Page filled = peekPlain(keys, parts.page_index);
        bank.open_page = parts.page_index;
        bank.row_alg = alg;
        bank.dirty = false;
        bank.row_plaintext = filled;
    }

    if (op == Op::Write) bank.dirty = true;

    bank.busy_until = t;
    out.completion = t;
    out.latency = t - now;
    return out;
}

AccessOutcome PcmModel::writePage(const KeyState& keys, Algorithm alg,
                                  std::uint64_t page_index,
                                  const Page& plaintext, double now) {
    keys.requireActive();
    if (page_index >= config_.numPages())
        throw SimError(ErrorCode::OutOfRange, "page beyond PCM capacity");
    const std::uint32_t bank_index =
        static_cast<std::uint32_t>(page_index % config_.num_banks);
    Bank& bank = banks_[bank_index];

    AccessOutcome out;
    double t = std::max(now, bank.busy_until);
    t += chargeCrypto(alg, CryptoDir::Encrypt);
    t += config_.writeCycles();
    storeToArray(keys, page_index, plaintext, alg);
    if (alg != Algorithm::NoneAlg) ++out.encrypts;
    ++out.array_writes;

    // The array now holds the newest data; refresh a matching open row so
    // it does not later write back stale contents.
    if (bank.open_page && *bank.open_page == page_index) {
        bank.row_plaintext = plaintext;
        bank.row_alg = alg;
        bank.dirty = false;
    }

    bank.busy_until = t;
    out.completion = t;
    out.latency = t - now;
    return out;
}

void PcmModel::refillPage(const KeyState& keys, Algorithm alg,
                          std::uint64_t page_index, const Page& plaintext) {
    keys.requireActive();
    chargeCrypto(alg, CryptoDir::Encrypt);
    storeToArray(keys, page_index, plaintext, alg);
    const std::uint32_t bank_index =
        static_cast<std::uint32_t>(page_index % config_.num_banks);
    Bank& bank = banks_[bank_index];
    if (bank.open_page && *bank.open_page == page_index) {
        bank.row_plaintext = plaintext;
        bank.row_alg = alg;
        bank.dirty = false;
    }
}

FlushOutcome PcmModel::flushRows(const KeyState& keys, double now) {
    keys.requireActive();
    FlushOutcome out;
    for (auto& bank : banks_) {
        if (!bank.open_page || !bank.dirty) continue;
        double t = std::max(now, bank.busy_until);
        t += chargeCrypto(bank.row_alg, CryptoDir::Encrypt);
        t += config_.writeCycles();
        storeToArray(keys, *bank.open_page, bank.row_plaintext, bank.row_alg);
        if (bank.row_alg != Algorithm::NoneAlg) ++out.encrypts;
        ++out.array_writes;
        bank.dirty = false;
        bank.busy_until = t;
    }
    return out;
}

void PcmModel::dropRows() {
    for (auto& bank : banks_) {
        bank.open_page.reset();
        bank.dirty = false;
    }
}

EvictOutcome PcmModel::evictToDisk(const KeyState& keys, Algorithm alg,
                                   std::uint64_t page_index, double now) {
    keys.requireActive();
    auto it = array_.find(page_index);
    if (it == array_.end())
        throw SimError(ErrorCode::PageAbsent,
                       "evict of page not present in NVM array");
    EvictOutcome out;
    const std::uint32_t bank_index =
        static_cast<std::uint32_t>(page_index % config_.num_banks);
    Bank& bank = banks_[bank_index];
    double t = std::max(now, bank.busy_until);
    t += chargeCrypto(alg, CryptoDir::Decrypt);
    if (alg != Algorithm::NoneAlg) ++out.decrypts;
    out.latency_cycles = t - now;
    array_.erase(it);
    if (bank.open_page && *bank.open_page == page_index) {
        bank.open_page.reset();
        bank.dirty = false;
    }
    ++counters_.disk_evictions;
    bank.busy_until = t;
    return out;
}

std::map<std::uint64_t, Page> PcmModel::dumpRaw() const {
    std::map<std::uint64_t, Page> dump;
    for (const auto& [page, stored] : array_) dump[page] = stored.ciphertext;
    return dump;
}

std::optional<Algorithm> PcmModel::storedAlgorithm(
    std::uint64_t page_index) const {
    auto it = array_.find(page_index);
    if (it == array_.end()) return std::nullopt;
    return it->second.alg;
}

Page PcmModel::peekPlain(const KeyState& keys,
                         std::uint64_t page_index) const {
    const std::uint32_t bank_index =
        static_cast<std::uint32_t>(page_index % config_.num_banks);
    const Bank& bank = banks_[bank_index];
    if (bank.open_page && *bank.open_page == page_index)
        return bank.row_plaintext;
    auto it = array_.find(page_index);
    if (it == array_.end()) return Page{};
    return decryptPage(it->second.ciphertext, keys.bankKey(bank_index),
                       page_index, it->second.alg);
}

double PcmModel::maxBusy() const {
    double t = 0.0;
    for (const auto& bank : banks_) t = std::max(t, bank.busy_until);
    return t;
}

} // namespace nvsim
