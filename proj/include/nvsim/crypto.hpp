#ifndef NVSIM_CRYPTO_HPP
#define NVSIM_CRYPTO_HPP

#include <array>
#include <cstdint>
#include <map>
#include <string>

#include "nvsim/error.hpp"
#include "nvsim/rng.hpp"

namespace nvsim {

constexpr std::size_t kPageBytes = 4096;
constexpr std::size_t kLineBytes = 64;
constexpr std::size_t kLinesPerPage = kPageBytes / kLineBytes;

/// Encryption algorithm tiers in increasing security order.
enum class Algorithm : int { NoneAlg = 0, DES = 1, AES = 2, RSA = 3 };

const char* algorithmName(Algorithm alg);
Algorithm algorithmFromName(const std::string& name);

enum class CryptoDir { Encrypt, Decrypt };

/// Per-word cycle/energy cost model. Defaults are the midpoints of the
/// published per-word cycle ranges for optimized hardware DES/AES/RSA.
struct CryptoCostModel {
    std::array<double, 4> per_word_cycles{0.0, 8.5, 13.5, 27.0};
    std::array<double, 4> per_word_energy{0.0, 1.0, 2.0, 8.0};
    std::uint32_t word_bytes = 8;
    double decrypt_factor = 1.0;

    double cyclesFor(Algorithm alg) const {
        return per_word_cycles[static_cast<int>(alg)];
    }
    double energyFor(Algorithm alg) const {
        return per_word_energy[static_cast<int>(alg)];
    }
    void validate() const;
};

/// Cycles to run `alg` over `page_bytes` bytes in the given direction.
double pageCryptoCycles(const CryptoCostModel& model, Algorithm alg,
                        std::uint64_t page_bytes, CryptoDir dir);

/// Energy to run `alg` over `page_bytes` bytes.
double pageCryptoEnergy(const CryptoCostModel& model, Algorithm alg,
                        std::uint64_t page_bytes);

struct Key128 {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;

    bool operator==(const Key128&) const = default;
};

struct Page {
    std::array<std::uint8_t, kPageBytes> bytes{};

    bool operator==(const Page&) const = default;
};

/// Keyed pseudorandom permutation of a 4 KB page, tweaked by page index
/// and algorithm tier. Feistel network over 16-byte blocks; NoneAlg is
/// the identity.
Page encryptPage(const Page& plaintext, const Key128& key,
                 std::uint64_t page_index, Algorithm alg);
Page decryptPage(const Page& ciphertext, const Key128& key,
                 std::uint64_t page_index, Algorithm alg);

enum class KeyPhase { PoweredDown, Active, Sleeping };

const char* keyPhaseName(KeyPhase phase);

/// Session-key lifecycle. Keys exist exactly while the phase is Active
/// or Sleeping; every boot draws a fresh per-bank key set.
class KeyState {
  public:
    KeyPhase phase() const { return phase_; }
    std::uint64_t sessionId() const { return session_id_; }
    std::size_t numBanks() const { return bank_keys_.size(); }

    const Key128& bankKey(std::uint32_t bank) const;

    void boot(Rng& rng, std::uint32_t num_banks);
    void enterSleep();
    void wake();
    void powerDown();

    /// Throws KeysUnavailable unless Active.
    void requireActive() const;

  private:
    KeyPhase phase_ = KeyPhase::PoweredDown;
    std::uint64_t session_id_ = 0;
    std::map<std::uint32_t, Key128> bank_keys_;
};

} // namespace nvsim

#endif
