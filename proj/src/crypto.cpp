#include "nvsim/crypto.hpp"

#include <cstring>

namespace nvsim {

const char* algorithmName(Algorithm alg) {
    switch (alg) {
        case Algorithm::NoneAlg: return "none";
        case Algorithm::DES: return "des";
        case Algorithm::AES: return "aes";
        case Algorithm::RSA: return "rsa";
    }
    return "?";
}

Algorithm algorithmFromName(const std::string& name) {
    if (name == "none") return Algorithm::NoneAlg;
    if (name == "des") return Algorithm::DES;
    if (name == "aes") return Algorithm::AES;
    if (name == "rsa") return Algorithm::RSA;
    throw SimError(ErrorCode::InvalidParams,
                   "unknown algorithm name: " + name);
}

void CryptoCostModel::validate() const {
    if (word_bytes == 0 || decrypt_factor <= 0.0)
        throw SimError(ErrorCode::InvalidParams, "bad crypto cost model");
    if (per_word_cycles[0] != 0.0 || per_word_energy[0] != 0.0)
        throw SimError(ErrorCode::InvalidParams,
                       "NoneAlg must have zero cost");
    for (int i = 1; i < 4; ++i) {
        if (per_word_cycles[i] < per_word_cycles[i - 1] ||
            per_word_cycles[i] < 0.0 || per_word_energy[i] < 0.0)
            throw SimError(ErrorCode::InvalidParams,
                           "per-word costs must be non-negative and "
                           "non-decreasing in algorithm order");
    }
}

double pageCryptoCycles(const CryptoCostModel& model, Algorithm alg,
                        std::uint64_t page_bytes, CryptoDir dir) {
    if (page_bytes % model.word_bytes != 0)
        throw SimError(ErrorCode::Misaligned,
                       "page size is not a word multiple");
    const double words =
        static_cast<double>(page_bytes / model.word_bytes);
    const double factor =
        dir == CryptoDir::Encrypt ? 1.0 : model.decrypt_factor;
    return words * model.cyclesFor(alg) * factor;
}

double pageCryptoEnergy(const CryptoCostModel& model, Algorithm alg,
                        std::uint64_t page_bytes) {
    if (page_bytes % model.word_bytes != 0)
        throw SimError(ErrorCode::Misaligned,
                       "page size is not a word multiple");
    const double words =
        static_cast<double>(page_bytes / model.word_bytes);
    return words * model.energyFor(alg);
}

namespace {

constexpr int kFeistelRounds = 6;

std::uint64_t roundF(std::uint64_t half, const Key128& key,
                     std::uint64_t tweak, int round) {
    const std::uint64_t k = (round & 1) ? key.hi : key.lo;
    return mix64(half ^ k ^ tweak ^
                 (0xa5a5a5a5a5a5a5a5ULL * static_cast<std::uint64_t>(round + 1)));
}

void cipherBlock(std::uint64_t& left, std::uint64_t& right,
                 const Key128& key, std::uint64_t tweak, bool decrypt) {
    if (!decrypt) {
        for (int r = 0; r < kFeistelRounds; ++r) {
            const std::uint64_t t = right;
            right = left ^ roundF(right, key, tweak, r);
            left = t;
        }
    } else {
        for (int r = kFeistelRounds - 1; r >= 0; --r) {
            const std::uint64_t t = left;
            left = right ^ roundF(left, key, tweak, r);
            right = t;
        }
    }
}

Page cipherPage(const Page& in, const Key128& key, std::uint64_t page_index,
                Algorithm alg, bool decrypt) {
    if (alg == Algorithm::NoneAlg) return in;
    Page out;
    constexpr std::size_t kBlock = 16;
    for (std::size_t off = 0; off < kPageBytes; off += kBlock) {
        std::uint64_t left, right;
        std::memcpy(&left, in.bytes.data() + off, 8);
        std::memcpy(&right, in.bytes.data() + off + 8, 8);
        // Tweak separates page slots, block positions and algorithm
        // tiers: the same plaintext never repeats across any of them,
        // and decrypting under the wrong tier yields garbage.
        const std::uint64_t tweak =
            mix64(page_index ^ (static_cast<std::uint64_t>(off / kBlock) << 40) ^
                  (static_cast<std::uint64_t>(alg) << 56));
        cipherBlock(left, right, key, tweak, decrypt);
        std::memcpy(out.bytes.data() + off, &left, 8);
        std::memcpy(out.bytes.data() + off + 8, &right, 8);
    }
    return out;
}

} // namespace

Page encryptPage(const Page& plaintext, const Key128& key,
                 std::uint64_t page_index, Algorithm alg) {
    return cipherPage(plaintext, key, page_index, alg, false);
}

Page decryptPage(const Page& ciphertext, const Key128& key,
                 std::uint64_t page_index, Algorithm alg) {
    return cipherPage(ciphertext, key, page_index, alg, true);
}

const char* keyPhaseName(KeyPhase phase) {
    switch (phase) {
        case KeyPhase::PoweredDown: return "powered_down";
        case KeyPhase::Active: return "active";
        case KeyPhase::Sleeping: return "sleeping";
    }
    return "?";
}

const Key128& KeyState::bankKey(std::uint32_t bank) const {
    auto it = bank_keys_.find(bank);
    if (it == bank_keys_.end())
        throw SimError(ErrorCode::KeysUnavailable,
                       "no key for bank " + std::to_string(bank));
    return it->second;
}

void KeyState::boot(Rng& rng, std::uint32_t num_banks) {
    if (phase_ != KeyPhase::PoweredDown)
        throw SimError(ErrorCode::BadTransition,
                       std::string("boot from ") + keyPhaseName(phase_));
    if (num_banks == 0)
        throw SimError(ErrorCode::InvalidParams, "boot with zero banks");
    bank_keys_.clear();
    for (std::uint32_t b = 0; b < num_banks; ++b)
        bank_keys_[b] = Key128{rng.next(), rng.next()};
    phase_ = KeyPhase::Active;
    ++session_id_;
}

void KeyState::enterSleep() {
    if (phase_ != KeyPhase::Active)
        throw SimError(ErrorCode::BadTransition,
                       std::string("enter_sleep from ") + keyPhaseName(phase_));
    phase_ = KeyPhase::Sleeping;
}

void KeyState::wake() {
    if (phase_ != KeyPhase::Sleeping)
        throw SimError(ErrorCode::BadTransition,
                       std::string("wake from ") + keyPhaseName(phase_));
    phase_ = KeyPhase::Active;
}

void KeyState::powerDown() {
    if (phase_ == KeyPhase::PoweredDown)
        throw SimError(ErrorCode::BadTransition,
                       "power_down from powered_down");
    bank_keys_.clear();
    phase_ = KeyPhase::PoweredDown;
}

void KeyState::requireActive() const {
    if (phase_ != KeyPhase::Active)
        throw SimError(ErrorCode::KeysUnavailable,
                       std::string("keys unavailable in phase ") +
                           keyPhaseName(phase_));
}

} // namespace nvsim
