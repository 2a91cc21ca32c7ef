#ifndef NVSIM_POLICY_HPP
#define NVSIM_POLICY_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "nvsim/crypto.hpp"
#include "nvsim/rng.hpp"

namespace nvsim {

enum class SecurityLevel : int { Unprotected = 0, Low = 1, Medium = 2, High = 3 };

const char* securityLevelName(SecurityLevel level);
SecurityLevel securityLevelFromName(const std::string& name);

/// Level-to-algorithm tier mapping: Unprotected->none, Low->DES,
/// Medium->AES, High->RSA.
Algorithm levelAlgorithm(SecurityLevel level);

/// OS-maintained per-page security flags plus validity bits.
class PageSecurityMap {
  public:
    SecurityLevel defaultLevel() const { return default_level_; }
    void setDefaultLevel(SecurityLevel level) { default_level_ = level; }

    SecurityLevel level(std::uint64_t page_index) const;
    void setFlag(std::uint64_t page_index, SecurityLevel level);
    void clearFlags() { flags_.clear(); }

    bool isValid(std::uint64_t page_index) const {
        return !invalid_.contains(page_index);
    }
    void markInvalid(std::uint64_t page_index) { invalid_.insert(page_index); }
    void markValid(std::uint64_t page_index) { invalid_.erase(page_index); }
    std::size_t invalidCount() const { return invalid_.size(); }

    const std::unordered_map<std::uint64_t, SecurityLevel>& flags() const {
        return flags_;
    }

  private:
    std::unordered_map<std::uint64_t, SecurityLevel> flags_;
    std::unordered_set<std::uint64_t> invalid_;
    SecurityLevel default_level_ = SecurityLevel::Unprotected;
};

/// Sidecar flag file: lines `START_HEX END_HEX LEVEL` (inclusive byte
/// range); later lines override earlier ones.
void loadSecurityFlags(std::istream& input, PageSecurityMap& map);
void loadSecurityFlagsFile(const std::string& path, PageSecurityMap& map);

struct PageRange {
    std::uint64_t first_page = 0;
    std::uint64_t last_page = 0; // inclusive
};

struct Phase {
    double fraction = 1.0;
    SecurityLevel level = SecurityLevel::Unprotected;
    std::vector<PageRange> page_ranges; // empty = applies as default level
};

enum class TransitionPolicy { KeepStronger, SwitchAndInvalidate };

struct PhaseSchedule {
    std::vector<Phase> phases;
    TransitionPolicy transition = TransitionPolicy::KeepStronger;

    bool empty() const { return phases.empty(); }
    void validate() const;
};

enum class BankMode { Uniform, RandomPerBank, FlagDriven };

struct PhaseChange {
    std::uint32_t algorithm_switches = 0;
    std::uint64_t invalidated_pages = 0;
};

struct RefaultOutcome {
    double penalty_cycles = 0.0;
};

/// Differentiated per-bank encryption policy: derives each bank's
/// algorithm from the highest security demand among its valid pages,
/// advances phase schedules, and tracks invalidated pages.
class EncryptionPolicy {
  public:
    EncryptionPolicy(BankMode mode, Algorithm uniform_alg,
                     std::uint32_t num_banks);

    BankMode mode() const { return mode_; }
    PageSecurityMap& pageMap() { return page_map_; }
    const PageSecurityMap& pageMap() const { return page_map_; }
    PhaseSchedule& schedule() { return schedule_; }

    double refaultPenaltyCycles() const { return refault_penalty_cycles_; }
    void setRefaultPenaltyCycles(double cycles) {
        refault_penalty_cycles_ = cycles;
    }

    Algorithm bankAlgorithm(std::uint32_t bank) const {
        return current_alg_[bank];
    }

    /// Per-page skip plus per-bank algorithm choice.
    Algorithm effectiveAlgorithm(std::uint64_t page_index) const;

    /// One-shot random per-bank assignment; distribution indexed by
    /// Algorithm and covering {DES, AES, RSA}.
    void assignRandom(Rng& rng, const std::array<double, 4>& distribution);

    /// Rederives every bank's algorithm from the current flags (pure
    /// flag-driven derivation, ignoring any kept stronger algorithm).
    void deriveFromFlags();

    /// Highest demand among the bank's valid pages (brute-force scan).
    SecurityLevel bankDemand(std::uint32_t bank) const;

    /// Advances the schedule to `completed_fraction` of the trace.
    /// Must be called with non-decreasing fractions.
    PhaseChange advancePhase(double completed_fraction);

    bool pageValid(std::uint64_t page_index) const {
        return page_map_.isValid(page_index);
    }

    /// Access to an invalidated page: charges the refetch penalty and
    /// restores validity. The caller performs the refill page write.
    RefaultOutcome accessInvalidPage(std::uint64_t page_index);

    /// Records that a page's array ciphertext now uses `alg`.
    void noteArrayWrite(std::uint64_t page_index, Algorithm alg);

    std::uint64_t refaultCount() const { return refaults_; }
    std::uint64_t invalidationCount() const { return invalidations_; }

  private:
    std::uint32_t bankOf(std::uint64_t page_index) const {
        return static_cast<std::uint32_t>(page_index % num_banks_);
    }
    PhaseChange applyPhase(std::size_t phase_index);

    BankMode mode_;
    std::uint32_t num_banks_;
    std::vector<Algorithm> current_alg_;
    PageSecurityMap page_map_;
    PhaseSchedule schedule_;
    double refault_penalty_cycles_ = 1e6;
    double last_fraction_ = -1.0;
    std::size_t current_phase_ = 0;
    bool phase_entered_ = false;
    std::unordered_map<std::uint64_t, Algorithm> written_alg_;
    std::uint64_t refaults_ = 0;
    std::uint64_t invalidations_ = 0;
};

} // namespace nvsim

#endif
