#include "nvsim/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nvsim/error.hpp"

namespace nvsim {

const char* securityLevelName(SecurityLevel level) {
    switch (level) {
        case SecurityLevel::Unprotected: return "UNPROTECTED";
        case SecurityLevel::Low: return "LOW";
        case SecurityLevel::Medium: return "MEDIUM";
        case SecurityLevel::High: return "HIGH";
    }
    return "?";
}

SecurityLevel securityLevelFromName(const std::string& name) {
    if (name == "UNPROTECTED") return SecurityLevel::Unprotected;
    if (name == "LOW") return SecurityLevel::Low;
    if (name == "MEDIUM") return SecurityLevel::Medium;
    if (name == "HIGH") return SecurityLevel::High;
    throw SimError(ErrorCode::InvalidParams,
                   "unknown security level: " + name);
}

Algorithm levelAlgorithm(SecurityLevel level) {
    return static_cast<Algorithm>(static_cast<int>(level));
}

SecurityLevel PageSecurityMap::level(std::uint64_t page_index) const {
    auto it = flags_.find(page_index);
    return it == flags_.end() ? default_level_ : it->second;
}

void PageSecurityMap::setFlag(std::uint64_t page_index, SecurityLevel level) {
    flags_[page_index] = level;
}

void loadSecurityFlags(std::istream& input, PageSecurityMap& map) {
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(input, line)) {
        ++lineno;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::istringstream fields(line);
        std::string start_tok, end_tok, level_tok;
        fields >> start_tok >> end_tok >> level_tok;
        if (fields.fail())
            throw SimError(ErrorCode::MalformedLine,
                           "flags line " + std::to_string(lineno) +
                               ": expected START_HEX END_HEX LEVEL");
        std::uint64_t lo, hi;
        try {
            lo = std::stoull(start_tok, nullptr, 16);
            hi = std::stoull(end_tok, nullptr, 16);
        } catch (const std::exception&) {
            throw SimError(ErrorCode::MalformedLine,
                           "flags line " + std::to_string(lineno) +
                               ": bad hex range");
        }
        if (hi < lo)
            throw SimError(ErrorCode::MalformedLine,
                           "flags line " + std::to_string(lineno) +
                               ": end before start");
        const SecurityLevel level = securityLevelFromName(level_tok);
        for (std::uint64_t page = lo / kPageBytes; page <= hi / kPageBytes;
             ++page)
            map.setFlag(page, level);
    }
}

void loadSecurityFlagsFile(const std::string& path, PageSecurityMap& map) {
    std::ifstream in(path);
    if (!in)
        throw SimError(ErrorCode::IoError, "cannot open flags file " + path);
    loadSecurityFlags(in, map);
}

void PhaseSchedule::validate() const {
    if (phases.empty()) return;
    double total = 0.0;
    for (const auto& phase : phases) {
        if (phase.fraction <= 0.0 || phase.fraction > 1.0)
            throw SimError(ErrorCode::InvalidParams,
                           "phase fraction must be in (0,1]");
        total += phase.fraction;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw SimError(ErrorCode::InvalidParams,
                       "phase fractions must sum to 1");
}

EncryptionPolicy::EncryptionPolicy(BankMode mode, Algorithm uniform_alg,
                                   std::uint32_t num_banks)
    : mode_(mode), num_banks_(num_banks),
      current_alg_(num_banks, mode == BankMode::Uniform ? uniform_alg
                                                        : Algorithm::NoneAlg) {
    if (num_banks == 0)
        throw SimError(ErrorCode::InvalidParams, "policy needs >= 1 bank");
}

Algorithm EncryptionPolicy::effectiveAlgorithm(
    std::uint64_t page_index) const {
    switch (mode_) {
        case BankMode::Uniform:
        case BankMode::RandomPerBank:
            return current_alg_[bankOf(page_index)];
        case BankMode::FlagDriven:
            if (page_map_.level(page_index) == SecurityLevel::Unprotected)
                return Algorithm::NoneAlg;
            return current_alg_[bankOf(page_index)];
    }
    return Algorithm::NoneAlg;
}

void EncryptionPolicy::assignRandom(Rng& rng,
                                    const std::array<double, 4>& distribution) {
    double total = 0.0;
    for (int i = 1; i < 4; ++i) {
        if (distribution[i] < 0.0)
            throw SimError(ErrorCode::BadDistribution,
                           "negative probability");
        total += distribution[i];
    }
    if (distribution[0] != 0.0 || std::abs(total - 1.0) > 1e-9)
        throw SimError(ErrorCode::BadDistribution,
                       "distribution over {DES, AES, RSA} must sum to 1");
    mode_ = BankMode::RandomPerBank;
    for (auto& alg : current_alg_) {
        const double u = rng.nextDouble();
        double cum = 0.0;
        alg = Algorithm::RSA;
        for (int i = 1; i < 4; ++i) {
            cum += distribution[i];
            if (u < cum) {
                alg = static_cast<Algorithm>(i);
                break;
            }
        }
    }
}

SecurityLevel EncryptionPolicy::bankDemand(std::uint32_t bank) const {
    SecurityLevel demand = page_map_.defaultLevel();
    for (const auto& [page, level] : page_map_.flags()) {
        if (bankOf(page) != bank || !page_map_.isValid(page)) continue;
        demand = std::max(demand, level);
    }
    return demand;
}

void EncryptionPolicy::deriveFromFlags() {
    for (std::uint32_t b = 0; b < num_banks_; ++b)
        current_alg_[b] = levelAlgorithm(bankDemand(b));
}

PhaseChange EncryptionPolicy::applyPhase(std::size_t phase_index) {
    const Phase& phase = schedule_.phases[phase_index];

    // Phase flags replace the previous phase's flags: the application has
    // moved on to a different sensitivity regime.
    page_map_.clearFlags();
    if (phase.page_ranges.empty()) {
        page_map_.setDefaultLevel(phase.level);
    } else {
        page_map_.setDefaultLevel(SecurityLevel::Unprotected);
        for (const auto& range : phase.page_ranges)
            for (std::uint64_t p = range.first_page; p <= range.last_page; ++p)
                page_map_.setFlag(p, phase.level);
    }

    PhaseChange change;
    for (std::uint32_t b = 0; b < num_banks_; ++b) {
        const Algorithm demanded = levelAlgorithm(bankDemand(b));
        const Algorithm old = current_alg_[b];
        if (demanded == old) continue;
        const bool escalation = demanded > old;
        if (!escalation &&
            schedule_.transition == TransitionPolicy::KeepStronger)
            continue; // pay the now-unnecessary stronger cost instead
        current_alg_[b] = demanded;
        ++change.algorithm_switches;
        // Pages stored under the replaced algorithm are now garbage.
        for (auto it = written_alg_.begin(); it != written_alg_.end();) {
            const auto [page, alg] = *it;
            if (bankOf(page) == b && alg == old &&
                alg != Algorithm::NoneAlg && page_map_.isValid(page)) {
                page_map_.markInvalid(page);
                ++change.invalidated_pages;
                it = written_alg_.erase(it);
            } else {
                ++it;
            }
        }
    }
    invalidations_ += change.invalidated_pages;
    return change;
}

PhaseChange EncryptionPolicy::advancePhase(double completed_fraction) {
    if (schedule_.empty()) return {};
    if (completed_fraction < last_fraction_ ||
        completed_fraction < 0.0 || completed_fraction > 1.0)
        throw SimError(ErrorCode::NonMonotonicFraction,
                       "completed_fraction must be non-decreasing in [0,1]");
    last_fraction_ = completed_fraction;

    // Phase i covers [cum_{i-1}, cum_i) of the trace.
    std::size_t target = 0;
    double cum = 0.0;
    for (std::size_t i = 0; i < schedule_.phases.size(); ++i) {
        cum += schedule_.phases[i].fraction;
        target = i;
        if (completed_fraction < cum - 1e-12) break;
    }

    PhaseChange change;
    if (!phase_entered_) {
        phase_entered_ = true;
        current_phase_ = 0;
        change = applyPhase(0);
        if (target == 0) return change;
    }
    while (current_phase_ < target) {
        ++current_phase_;
        const PhaseChange step = applyPhase(current_phase_);
        change.algorithm_switches += step.algorithm_switches;
        change.invalidated_pages += step.invalidated_pages;
    }
    return change;
}

RefaultOutcome EncryptionPolicy::accessInvalidPage(std::uint64_t page_index) {
    if (page_map_.isValid(page_index))
        throw SimError(ErrorCode::InvalidParams,
                       "refault of a page that is still valid");
    page_map_.markValid(page_index);
    ++refaults_;
    return RefaultOutcome{refault_penalty_cycles_};
}

void EncryptionPolicy::noteArrayWrite(std::uint64_t page_index,
                                      Algorithm alg) {
    written_alg_[page_index] = alg;
}

} // namespace nvsim
