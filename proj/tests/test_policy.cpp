#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "nvsim/policy.hpp"

using namespace nvsim;

namespace {

PageSecurityMap parseFlags(const std::string& text) {
    std::istringstream in(text);
    PageSecurityMap map;
    loadSecurityFlags(in, map);
    return map;
}

PhaseSchedule twoPhase(SecurityLevel first, SecurityLevel second,
                       TransitionPolicy transition) {
    PhaseSchedule s;
    s.phases.push_back({0.5, first, {}});
    s.phases.push_back({0.5, second, {}});
    s.transition = transition;
    return s;
}

} // namespace

TEST_CASE("level order and algorithm mapping") {
    CHECK(SecurityLevel::Unprotected < SecurityLevel::Low);
    CHECK(SecurityLevel::Low < SecurityLevel::Medium);
    CHECK(SecurityLevel::Medium < SecurityLevel::High);
    CHECK(levelAlgorithm(SecurityLevel::Unprotected) == Algorithm::NoneAlg);
    CHECK(levelAlgorithm(SecurityLevel::Low) == Algorithm::DES);
    CHECK(levelAlgorithm(SecurityLevel::Medium) == Algorithm::AES);
    CHECK(levelAlgorithm(SecurityLevel::High) == Algorithm::RSA);
    for (SecurityLevel l : {SecurityLevel::Unprotected, SecurityLevel::Low,
                            SecurityLevel::Medium, SecurityLevel::High})
        CHECK(securityLevelFromName(securityLevelName(l)) == l);
    CHECK_THROWS_AS(securityLevelFromName("SECRET"), SimError);
}

TEST_CASE("page map defaults and validity") {
    PageSecurityMap map;
    CHECK(map.level(42) == SecurityLevel::Unprotected);
    map.setDefaultLevel(SecurityLevel::Medium);
    CHECK(map.level(42) == SecurityLevel::Medium);
    map.setFlag(42, SecurityLevel::High);
    CHECK(map.level(42) == SecurityLevel::High);
    CHECK(map.isValid(42));
    map.markInvalid(42);
    CHECK(!map.isValid(42));
    CHECK(map.invalidCount() == 1);
    map.markValid(42);
    CHECK(map.isValid(42));
}

TEST_CASE("flags file: ranges are inclusive byte spans at page granularity") {
    const auto map = parseFlags("0x0 0x1fff HIGH\n");
    CHECK(map.level(0) == SecurityLevel::High);
    CHECK(map.level(1) == SecurityLevel::High); // 0x1fff is inside page 1
    CHECK(map.level(2) == SecurityLevel::Unprotected);
}

TEST_CASE("flags file: later lines override earlier ones") {
    const auto map = parseFlags(
        "# header comment\n"
        "\n"
        "0x0 0x3fff LOW\n"
        "0x1000 0x1fff HIGH\n");
    CHECK(map.level(0) == SecurityLevel::Low);
    CHECK(map.level(1) == SecurityLevel::High);
    CHECK(map.level(2) == SecurityLevel::Low);
    CHECK(map.level(3) == SecurityLevel::Low);
}

TEST_CASE("flags file: malformed lines") {
    CHECK_THROWS_AS(parseFlags("0x0 HIGH\n"), SimError);        // missing field
    CHECK_THROWS_AS(parseFlags("zz 0x1000 HIGH\n"), SimError);  // bad hex
    CHECK_THROWS_AS(parseFlags("0x2000 0x1000 HIGH\n"), SimError); // reversed
    CHECK_THROWS_AS(parseFlags("0x0 0x1000 SECRET\n"), SimError); // bad level
    try {
        parseFlags("0x0 0xfff LOW\nbroken\n");
        FAIL("expected a parse error");
    } catch (const SimError& e) {
        CHECK(e.code() == ErrorCode::MalformedLine);
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
    PageSecurityMap map;
    CHECK_THROWS_AS(loadSecurityFlagsFile("/no/such/file", map), SimError);
}

TEST_CASE("uniform mode applies one algorithm to every bank") {
    EncryptionPolicy policy(BankMode::Uniform, Algorithm::AES, 4);
    for (std::uint32_t b = 0; b < 4; ++b)
        CHECK(policy.bankAlgorithm(b) == Algorithm::AES);
    CHECK(policy.effectiveAlgorithm(0) == Algorithm::AES);
    CHECK(policy.effectiveAlgorithm(123) == Algorithm::AES);
}

TEST_CASE("bank escalates to its highest-demand page") {
    EncryptionPolicy policy(BankMode::FlagDriven, Algorithm::NoneAlg, 4);
    policy.pageMap().setFlag(0, SecurityLevel::Low);  // bank 0
    policy.pageMap().setFlag(4, SecurityLevel::High); // bank 0 too
    policy.deriveFromFlags();
    CHECK(policy.bankAlgorithm(0) == Algorithm::RSA);
    // Querying the Low page yields the bank's escalated algorithm.
    CHECK(policy.effectiveAlgorithm(0) == Algorithm::RSA);
    CHECK(policy.effectiveAlgorithm(4) == Algorithm::RSA);
}

TEST_CASE("unprotected page in a protected bank skips encryption") {
    EncryptionPolicy policy(BankMode::FlagDriven, Algorithm::NoneAlg, 4);
    policy.pageMap().setFlag(4, SecurityLevel::High);
    policy.deriveFromFlags();
    CHECK(policy.bankAlgorithm(0) == Algorithm::RSA);
    CHECK(policy.effectiveAlgorithm(0) == Algorithm::NoneAlg); // page 0 unflagged
    CHECK(policy.effectiveAlgorithm(4) == Algorithm::RSA);
}

TEST_CASE("all pages unprotected eliminates encryption everywhere") {
    EncryptionPolicy policy(BankMode::FlagDriven, Algorithm::NoneAlg, 4);
    policy.deriveFromFlags();
    for (std::uint64_t p = 0; p < 16; ++p)
        CHECK(policy.effectiveAlgorithm(p) == Algorithm::NoneAlg);
}

TEST_CASE("invalid pages do not contribute to bank demand") {
    EncryptionPolicy policy(BankMode::FlagDriven, Algorithm::NoneAlg, 1);
    policy.pageMap().setFlag(3, SecurityLevel::High);
    policy.pageMap().setFlag(5, SecurityLevel::Low);
    CHECK(policy.bankDemand(0) == SecurityLevel::High);
    policy.pageMap().markInvalid(3);
    CHECK(policy.bankDemand(0) == SecurityLevel::Low);
}

TEST_CASE("flag-driven derivation matches a brute-force scan") {
    Rng rng(17);
    EncryptionPolicy policy(BankMode::FlagDriven, Algorithm::NoneAlg, 4);
    for (int i = 0; i < 200; ++i) {
        const std::uint64_t page = rng.nextBelow(64);
        policy.pageMap().setFlag(
            page, static_cast<SecurityLevel>(rng.nextBelow(4)));
        if (rng.nextDouble() < 0.2) policy.pageMap().markInvalid(page);
    }
    policy.deriveFromFlags();
    for (std::uint32_t b = 0; b < 4; ++b) {
        SecurityLevel brute = SecurityLevel::Unprotected;
        for (std::uint64_t page = 0; page < 64; ++page) {
            if (page % 4 != b || !policy.pageMap().isValid(page)) continue;
            brute = std::max(brute, policy.pageMap().level(page));
        }
        CHECK(policy.bankAlgorithm(b) == levelAlgorithm(brute));
        // Never below any valid page's demand.
        for (std::uint64_t page = b; page < 64; page += 4)
            if (policy.pageMap().isValid(page))
                CHECK(policy.bankAlgorithm(b) >=
                      levelAlgorithm(policy.pageMap().level(page)));
    }
}

TEST_CASE("degenerate random distribution assigns DES everywhere") {
    Rng rng(1);
    EncryptionPolicy policy(BankMode::RandomPerBank, Algorithm::NoneAlg, 8);
    policy.assignRandom(rng, {0.0, 1.0, 0.0, 0.0});
    for (std::uint32_t b = 0; b < 8; ++b)
        CHECK(policy.bankAlgorithm(b) == Algorithm::DES);
}

TEST_CASE("random assignment is reproducible per seed") {
    const auto assign = [](std::uint64_t seed) {
        Rng rng(seed);
        EncryptionPolicy p(BankMode::RandomPerBank, Algorithm::NoneAlg, 64);
        p.assignRandom(rng, {0.0, 1.0 / 3, 1.0 / 3, 1.0 / 3});
        std::vector<Algorithm> algs;
        for (std::uint32_t b = 0; b < 64; ++b)
            algs.push_back(p.bankAlgorithm(b));
        return algs;
    };
    CHECK(assign(5) == assign(5));
    CHECK(assign(5) != assign(6));
}

TEST_CASE("uniform thirds distribution concentrates over 3000 banks") {
    Rng rng(99);
    EncryptionPolicy policy(BankMode::RandomPerBank, Algorithm::NoneAlg, 3000);
    policy.assignRandom(rng, {0.0, 1.0 / 3, 1.0 / 3, 1.0 / 3});
    std::array<int, 4> counts{};
    for (std::uint32_t b = 0; b < 3000; ++b)
        ++counts[static_cast<int>(policy.bankAlgorithm(b))];
    CHECK(counts[0] == 0);
    for (int i = 1; i < 4; ++i) {
        const double freq = counts[i] / 3000.0;
        CHECK(freq > 1.0 / 3 - 0.05);
        CHECK(freq < 1.0 / 3 + 0.05);
    }
}

TEST_CASE("bad random distributions are rejected") {
    Rng rng(1);
    EncryptionPolicy policy(BankMode::RandomPerBank, Algorithm::NoneAlg, 2);
    CHECK_THROWS_AS(policy.assignRandom(rng, {0.0, 0.5, 0.0, 0.0}), SimError);
    CHECK_THROWS_AS(policy.assignRandom(rng, {0.0, -0.5, 1.5, 0.0}), SimError);
    CHECK_THROWS_AS(policy.assignRandom(rng, {0.5, 0.5, 0.0, 0.0}), SimError);
}

TEST_CASE("schedule validation") {
    PhaseSchedule s;
    CHECK_NOTHROW(s.validate()); // empty = no schedule
    s.phases.push_back({0.6, SecurityLevel::High, {}});
    CHECK_THROWS_AS(s.validate(), SimError); // sums to 0.6
    s.phases.push_back({0.4, SecurityLevel::Low, {}});
    CHECK_NOTHROW(s.validate());
    s.phases[0].fraction = 0.0;
    CHECK_THROWS_AS(s.validate(), SimError);
    s.phases[0].fraction = 1.1;
    CHECK_THROWS_AS(s.validate(), SimError);
}

TEST_CASE("high-to-low transition under KeepStronger keeps the algorithm") {
    EncryptionPolicy policy(BankMode::FlagDriven, Algorithm::NoneAlg, 1);
    policy.schedule() = twoPhase(SecurityLevel::High, SecurityLevel::Low,
                                 TransitionPolicy::KeepStronger);
    const PhaseChange enter = policy.advancePhase(0.0);
    CHECK(enter.algorithm_switches == 1); // NoneAlg -> RSA on entry
    CHECK(policy.bankAlgorithm(0) == Algorithm::RSA);
    for (std::uint64_t p = 0; p < 10; ++p)
        policy.noteArrayWrite(p, Algorithm::RSA);

    const PhaseChange change = policy.advancePhase(0.5);
    CHECK(change.algorithm_switches == 0);
    CHECK(change.invalidated_pages == 0);
    CHECK(policy.bankAlgorithm(0) == Algorithm::RSA); // stronger retained
    CHECK(policy.invalidationCount() == 0);
}

TEST_CASE("high-to-low under SwitchAndInvalidate invalidates written pages") {
    EncryptionPolicy policy(BankMode::FlagDriven, Algorithm::NoneAlg, 1);
    policy.schedule() = twoPhase(SecurityLevel::High, SecurityLevel::Low,
                                 TransitionPolicy::SwitchAndInvalidate);
    policy.advancePhase(0.0);
    for (std::uint64_t p = 0; p < 10; ++p)
        policy.noteArrayWrite(p, Algorithm::RSA);

    const PhaseChange change = policy.advancePhase(0.5);
    CHECK(change.algorithm_switches == 1);
    CHECK(change.invalidated_pages == 10);
    CHECK(policy.bankAlgorithm(0) == Algorithm::DES);
    CHECK(policy.invalidationCount() == 10);
    for (std::uint64_t p = 0; p < 10; ++p) CHECK(!policy.pageValid(p));
}

TEST_CASE("escalation always switches, even under KeepStronger") {
    EncryptionPolicy policy(BankMode::FlagDriven, Algorithm::NoneAlg, 1);
    policy.schedule() = twoPhase(SecurityLevel::Low, SecurityLevel::High,
                                 TransitionPolicy::KeepStronger);
    policy.advancePhase(0.0);
    CHECK(policy.bankAlgorithm(0) == Algorithm::DES);
    policy.noteArrayWrite(0, Algorithm::DES);

    const PhaseChange change = policy.advancePhase(0.6);
    CHECK(change.algorithm_switches == 1);
    CHECK(policy.bankAlgorithm(0) == Algorithm::RSA);
    // The DES-ciphered page is garbage under the new bank algorithm.
    CHECK(change.invalidated_pages == 1);
    CHECK(!policy.pageValid(0));
}

TEST_CASE("pages written without encryption survive a switch") {
    EncryptionPolicy policy(BankMode::FlagDriven, Algorithm::NoneAlg, 1);
    policy.schedule() = twoPhase(SecurityLevel::Unprotected,
                                 SecurityLevel::High,
                                 TransitionPolicy::SwitchAndInvalidate);
    policy.advancePhase(0.0);
    policy.noteArrayWrite(0, Algorithm::NoneAlg);
    const PhaseChange change = policy.advancePhase(0.9);
    CHECK(change.algorithm_switches == 1);
    CHECK(change.invalidated_pages == 0); // plaintext is never garbage
    CHECK(policy.pageValid(0));
}

TEST_CASE("single-phase schedule never changes after entry") {
    EncryptionPolicy policy(BankMode::FlagDriven, Algorithm::NoneAlg, 2);
    policy.schedule().phases.push_back({1.0, SecurityLevel::Medium, {}});
    const PhaseChange enter = policy.advancePhase(0.0);
    CHECK(enter.algorithm_switches == 2);
    for (double f : {0.2, 0.5, 0.9, 1.0}) {
        const PhaseChange c = policy.advancePhase(f);
        CHECK(c.algorithm_switches == 0);
        CHECK(c.invalidated_pages == 0);
    }
}

TEST_CASE("phase boundaries are half-open on completed fraction") {
    EncryptionPolicy policy(BankMode::FlagDriven, Algorithm::NoneAlg, 1);
    policy.schedule() = twoPhase(SecurityLevel::High, SecurityLevel::Low,
                                 TransitionPolicy::SwitchAndInvalidate);
    policy.advancePhase(0.0);
    CHECK(policy.advancePhase(0.49).algorithm_switches == 0);
    CHECK(policy.bankAlgorithm(0) == Algorithm::RSA);
    CHECK(policy.advancePhase(0.5).algorithm_switches == 1); // boundary
    CHECK(policy.bankAlgorithm(0) == Algorithm::DES);
}

TEST_CASE("fractions must be non-decreasing and within range") {
    EncryptionPolicy policy(BankMode::FlagDriven, Algorithm::NoneAlg, 1);
    policy.schedule() = twoPhase(SecurityLevel::High, SecurityLevel::Low,
                                 TransitionPolicy::KeepStronger);
    policy.advancePhase(0.5);
    CHECK_THROWS_AS(policy.advancePhase(0.4), SimError);
    CHECK_THROWS_AS(policy.advancePhase(1.5), SimError);
    EncryptionPolicy fresh(BankMode::FlagDriven, Algorithm::NoneAlg, 1);
    fresh.schedule() = policy.schedule();
    CHECK_THROWS_AS(fresh.advancePhase(-0.1), SimError);
}

TEST_CASE("phases with page ranges protect only those ranges") {
    EncryptionPolicy policy(BankMode::FlagDriven, Algorithm::NoneAlg, 1);
    PhaseSchedule s;
    s.phases.push_back({0.5, SecurityLevel::High, {{0, 3}}});
    s.phases.push_back({0.5, SecurityLevel::Low, {{8, 11}}});
    s.transition = TransitionPolicy::KeepStronger;
    policy.schedule() = s;

    policy.advancePhase(0.0);
    CHECK(policy.effectiveAlgorithm(0) == Algorithm::RSA);
    CHECK(policy.effectiveAlgorithm(8) == Algorithm::NoneAlg); // unflagged

    for (std::uint64_t p = 0; p <= 3; ++p)
        policy.noteArrayWrite(p, Algorithm::RSA);
    const PhaseChange change = policy.advancePhase(0.7);
    // Disjoint ranges + KeepStronger: no invalidations at all.
    CHECK(change.invalidated_pages == 0);
    CHECK(policy.invalidationCount() == 0);
    CHECK(policy.effectiveAlgorithm(8) == Algorithm::RSA); // bank kept RSA
    CHECK(policy.effectiveAlgorithm(0) == Algorithm::NoneAlg); // now unflagged
}

TEST_CASE("refault on an invalidated page charges the penalty once") {
    EncryptionPolicy policy(BankMode::FlagDriven, Algorithm::NoneAlg, 1);
    policy.pageMap().markInvalid(7);
    CHECK(!policy.pageValid(7));
    const RefaultOutcome out = policy.accessInvalidPage(7);
    CHECK(out.penalty_cycles == doctest::Approx(1e6)); // default penalty
    CHECK(policy.pageValid(7)); // validity restored
    CHECK(policy.refaultCount() == 1);
    CHECK_THROWS_AS(policy.accessInvalidPage(7), SimError); // already valid
}

TEST_CASE("refault penalty is configurable") {
    EncryptionPolicy policy(BankMode::FlagDriven, Algorithm::NoneAlg, 1);
    policy.setRefaultPenaltyCycles(500.0);
    policy.pageMap().markInvalid(1);
    CHECK(policy.accessInvalidPage(1).penalty_cycles ==
          doctest::Approx(500.0));
}

TEST_CASE("zero banks are rejected") {
    CHECK_THROWS_AS(EncryptionPolicy(BankMode::Uniform, Algorithm::AES, 0),
                    SimError);
}
