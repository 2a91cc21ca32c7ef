// Acceptance suite: one PASS/FAIL line per criterion. The path to the
// command-line binary is passed as argv[1] (used by criterion 3).
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "nvsim/config.hpp"
#include "nvsim/engine.hpp"
#include "nvsim/presets.hpp"

using namespace nvsim;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool ok,
            const std::string& detail = "") {
    std::cout << (ok ? "PASS" : "FAIL") << " " << index << ": " << name;
    if (!detail.empty()) std::cout << " [" << detail << "]";
    std::cout << "\n";
    if (!ok) ++g_failures;
}

template <typename Fn>
void criterion(int index, const std::string& name, Fn&& fn) {
    try {
        std::string detail;
        const bool ok = fn(detail);
        report(index, name, ok, detail);
    } catch (const std::exception& e) {
        report(index, name, false, std::string("exception: ") + e.what());
    }
}

Trace smallTrace(std::uint64_t seed, std::uint64_t n = 200,
                 double write_fraction = 0.4) {
    SyntheticParams p;
    p.num_requests = n;
    p.footprint_pages = 16;
    p.locality_alpha = 0.6;
    p.write_fraction = write_fraction;
    p.mean_gap_cycles = 4;
    p.seed = seed;
    return generateSynthetic(p);
}

SimConfig configFor(Algorithm alg, bool with_dram) {
    SimConfig c;
    c.policy.uniform_alg = alg;
    if (with_dram) c.dram = DramConfig{};
    return c;
}

constexpr Algorithm kAllAlgs[] = {Algorithm::NoneAlg, Algorithm::DES,
                                  Algorithm::AES, Algorithm::RSA};

// ---- criteria -------------------------------------------------------------

bool zeroExtraWrites(std::string& detail) {
    std::uint64_t checked = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const Trace t = smallTrace(seed);
        for (const bool with_dram : {false, true}) {
            const SimStats base = run(t, configFor(Algorithm::NoneAlg,
                                                   with_dram));
            for (Algorithm alg :
                 {Algorithm::DES, Algorithm::AES, Algorithm::RSA}) {
                const SimStats s = run(t, configFor(alg, with_dram));
                ++checked;
                if (s.pcm_page_writes != base.pcm_page_writes ||
                    s.endurance_total != base.endurance_total) {
                    detail = "trace seed " + std::to_string(seed) +
                             " dram=" + (with_dram ? "on" : "off") +
                             ": write counts diverge across algorithms";
                    return false;
                }
            }
        }
    }
    detail = std::to_string(checked) + " algorithm/config pairs, exact";
    return true;
}

bool oracleEquivalence(std::string& detail) {
    std::uint64_t mismatches = 0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        SyntheticParams p;
        p.num_requests = 20 + (i % 81); // <= 100 records
        p.footprint_pages = 2 + (i % 10);
        p.locality_alpha = 0.1 * static_cast<double>(i % 12);
        p.write_fraction = 0.1 * static_cast<double>(i % 10);
        p.mean_gap_cycles = i % 40;
        p.page_stride = 4; // single bank
        p.seed = 1000 + i;
        const Trace t = generateSynthetic(p);
        SimConfig c;
        c.policy.uniform_alg = kAllAlgs[i % 4];
        const double expected = analyticTotal(t, c);
        const double actual = run(t, c).exec_cycles;
        if (std::abs(actual - expected) > 1e-9) ++mismatches;
    }
    detail = "1000 single-bank traces, " + std::to_string(mismatches) +
             " mismatches";
    return mismatches == 0;
}

int runCommand(const std::string& command) {
    const int status = std::system((command + " >/dev/null 2>&1").c_str());
    return status < 0 ? -1 : WEXITSTATUS(status);
}

bool cryptoSoundness(const std::string& cli, std::string& detail) {
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        Page plain;
        for (std::size_t i = 0; i < kPageBytes; i += 8) {
            const std::uint64_t v = rng.next();
            std::memcpy(plain.bytes.data() + i, &v, 8);
        }
        const Key128 key{rng.next(), rng.next()};
        const std::uint64_t index = rng.next() % (1 << 20);
        const Algorithm alg = kAllAlgs[1 + trial % 3];
        const Page cipher = encryptPage(plain, key, index, alg);
        if (cipher == plain) {
            detail = "ciphertext equals plaintext";
            return false;
        }
        if (decryptPage(cipher, key, index, alg) != plain) {
            detail = "decrypt-encrypt identity violated";
            return false;
        }
    }
    if (cli.empty()) {
        detail = "no CLI binary path supplied";
        return false;
    }

    const std::string dir =
        "/tmp/nvsim-acceptance-" + std::to_string(getpid());
    if (runCommand("mkdir -p " + dir) != 0) {
        detail = "cannot create temp dir";
        return false;
    }
    const std::string trace_path = dir + "/c3.trace";
    writeTraceFile(smallTrace(7, 300, 0.8), trace_path);
    {
        std::ofstream cfg(dir + "/aes.ini");
        cfg << "[policy]\nalgorithm = aes\n";
    }

    // Protected workload: the raw snapshot must not contain plaintext.
    if (runCommand(cli + " --config " + dir + "/aes.ini --out " + dir +
                   "/r1.json run --trace " + trace_path + " --snapshot " +
                   dir + "/enc.json") != 0) {
        detail = "protected run failed";
        return false;
    }
    if (runCommand(cli + " --out " + dir + "/d1.txt dump-nvm " + dir +
                   "/enc.json --check-plaintext " + trace_path) != 0) {
        detail = "check-plaintext rejected an encrypted snapshot";
        return false;
    }

    // Unencrypted workload: the same check must detect the leak.
    if (runCommand(cli + " --out " + dir + "/r2.json run --trace " +
                   trace_path + " --snapshot " + dir + "/plain.json") != 0) {
        detail = "unencrypted run failed";
        return false;
    }
    const int leak = runCommand(cli + " --out " + dir + "/d2.txt dump-nvm " +
                                dir + "/plain.json --check-plaintext " +
                                trace_path);
    if (leak != 1) {
        detail = "check-plaintext missed a plaintext snapshot (exit " +
                 std::to_string(leak) + ")";
        return false;
    }
    runCommand("rm -rf " + dir);
    detail = "100 tuples + CLI plaintext check both ways";
    return true;
}

bool decryptOnceAndCombining(std::string& detail) {
    for (std::uint64_t k : {1ull, 2ull, 64ull}) {
        Trace reads, writes;
        for (std::uint64_t i = 0; i < k; ++i) {
            reads.records.push_back({Op::Read, (i % 64) * 64, 0});
            writes.records.push_back({Op::Write, (i % 64) * 64, 0});
        }
        const SimConfig c = configFor(Algorithm::AES, false);
        const SimStats r = run(reads, c);
        if (r.totalDecrypts() != 1 || r.pcm_page_writes != 0) {
            detail = "K=" + std::to_string(k) + " reads: " +
                     std::to_string(r.totalDecrypts()) + " decrypts";
            return false;
        }
        const SimStats w = run(writes, c);
        if (w.totalEncrypts() != 1 || w.pcm_page_writes != 1) {
            detail = "N=" + std::to_string(k) + " writes: " +
                     std::to_string(w.totalEncrypts()) + " encrypts, " +
                     std::to_string(w.pcm_page_writes) + " page writes";
            return false;
        }
    }
    detail = "K,N in {1,2,64}, exact";
    return true;
}

bool overheadOrdering(const Trace& mcf, std::string& detail) {
    double prev_cycles = -1.0;
    double prev_energy = -1.0;
    std::ostringstream seen;
    for (Algorithm alg : kAllAlgs) {
        const SimStats s = run(mcf, configFor(alg, false));
        if (s.exec_cycles <= prev_cycles || s.totalEnergy() <= prev_energy) {
            detail = std::string("ordering broken at ") + algorithmName(alg);
            return false;
        }
        seen << (alg == Algorithm::NoneAlg ? "" : " < ")
             << algorithmName(alg);
        prev_cycles = s.exec_cycles;
        prev_energy = s.totalEnergy();
    }
    detail = "perf and energy: " + seen.str();
    return true;
}

bool dramTrends(const Trace& mcf, const Trace& milc, std::string& detail) {
    const auto overheadRsa = [](const Trace& t, bool with_dram) {
        const SimStats base = run(t, configFor(Algorithm::NoneAlg, with_dram));
        const SimStats rsa = run(t, configFor(Algorithm::RSA, with_dram));
        return compare(rsa, base).perf_pct;
    };
    const auto filter = [](const Trace& t) {
        const SimStats on = run(t, configFor(Algorithm::NoneAlg, true));
        const SimStats off = run(t, configFor(Algorithm::NoneAlg, false));
        return filterRate(on, off);
    };

    const double mcf_filter = filter(mcf);
    if (mcf_filter < 0.60 || std::abs(mcf_filter - 0.63) > 0.05) {
        detail = "mcf-like filter rate " + std::to_string(mcf_filter);
        return false;
    }
    const double mcf_off = overheadRsa(mcf, false);
    const double mcf_on = overheadRsa(mcf, true);
    if (!(mcf_on < mcf_off)) {
        detail = "DRAM did not reduce mcf-like RSA overhead (" +
                 std::to_string(mcf_off) + " -> " + std::to_string(mcf_on) +
                 ")";
        return false;
    }

    const double milc_filter = filter(milc);
    if (milc_filter < 0.10 || milc_filter > 0.20 ||
        std::abs(milc_filter - 0.15) > 0.05) {
        detail = "milc-like filter rate " + std::to_string(milc_filter);
        return false;
    }
    const double milc_off = overheadRsa(milc, false);
    const double milc_on = overheadRsa(milc, true);
    if (!(milc_on > milc_off)) {
        detail = "DRAM did not increase milc-like RSA overhead (" +
                 std::to_string(milc_off) + " -> " + std::to_string(milc_on) +
                 ")";
        return false;
    }

    std::ostringstream oss;
    oss.precision(3);
    oss << "filters " << mcf_filter << "/" << milc_filter << "; RSA overhead "
        << mcf_off << "%->" << mcf_on << "% and " << milc_off << "%->"
        << milc_on << "%";
    detail = oss.str();
    return true;
}

bool differentiatedBound(const Trace& mcf, const Trace& milc,
                         std::string& detail) {
    SimConfig mixed;
    mixed.policy.mode = BankMode::FlagDriven;
    mixed.policy.schedule.transition = TransitionPolicy::SwitchAndInvalidate;
    mixed.policy.schedule.phases.push_back({0.15, SecurityLevel::Low, {}});
    mixed.policy.schedule.phases.push_back({0.60, SecurityLevel::Medium, {}});
    mixed.policy.schedule.phases.push_back({0.25, SecurityLevel::High, {}});

    std::ostringstream oss;
    oss.precision(4);
    for (const auto* entry : {&mcf, &milc}) {
        const Trace& t = *entry;
        const double des =
            run(t, configFor(Algorithm::DES, false)).exec_cycles;
        const double rsa =
            run(t, configFor(Algorithm::RSA, false)).exec_cycles;
        const double mix = run(t, mixed).exec_cycles;
        if (!(des < mix && mix < rsa)) {
            oss << "mixed schedule not strictly between: DES " << des
                << ", mix " << mix << ", RSA " << rsa;
            detail = oss.str();
            return false;
        }
        oss << (entry == &mcf ? "mcf " : "; milc ") << des << " < " << mix
            << " < " << rsa;
    }
    detail = oss.str();
    return true;
}

bool keyLifecycle(std::string& detail) {
    Rng rng(77);
    KeyState ks;
    ks.boot(rng, 4);
    Key128 first[4];
    for (std::uint32_t b = 0; b < 4; ++b) first[b] = ks.bankKey(b);
    ks.enterSleep();
    ks.wake();
    for (std::uint32_t b = 0; b < 4; ++b)
        if (!(ks.bankKey(b) == first[b])) {
            detail = "sleep/wake did not preserve keys";
            return false;
        }
    ks.powerDown();
    try {
        ks.bankKey(0);
        detail = "keys survived power-down";
        return false;
    } catch (const SimError&) {
    }
    try {
        ks.requireActive();
        detail = "decryption allowed after power-down";
        return false;
    } catch (const SimError&) {
    }
    ks.boot(rng, 4);
    for (std::uint32_t b = 0; b < 4; ++b)
        for (std::uint32_t c = 0; c < 4; ++c)
            if (ks.bankKey(b) == first[c]) {
                detail = "second session reused a key";
                return false;
            }

    // Instant-on: after sleep/wake the previously open page needs only a
    // row fill from the intact array, never a disk refetch.
    SimConfig c = configFor(Algorithm::AES, false);
    c.sleep_at_records = {1};
    Trace t;
    t.records.push_back({Op::Read, 0x0, 0});
    t.records.push_back({Op::Read, 0x40, 10});
    const SimStats s = run(t, c);
    if (s.row_misses != 2 || s.invalidation_refaults != 0 ||
        s.disk_evictions != 0) {
        detail = "post-wake read did not refill from the array";
        return false;
    }
    detail = "disjoint sessions, sleep persistence, erase-on-power-down";
    return true;
}

bool phaseTransitionAlternatives(std::string& detail) {
    // (a) KeepStronger over disjoint per-phase working sets: no refaults.
    {
        SimConfig c;
        c.policy.mode = BankMode::FlagDriven;
        c.policy.schedule.transition = TransitionPolicy::KeepStronger;
        c.policy.schedule.phases.push_back({0.5, SecurityLevel::High, {{0, 9}}});
        c.policy.schedule.phases.push_back({0.5, SecurityLevel::Low, {{16, 25}}});
        Trace t;
        for (std::uint64_t p = 0; p < 10; ++p) {
            t.records.push_back({Op::Write, p * kPageBytes, 2});
            t.records.push_back({Op::Read, p * kPageBytes, 2});
        }
        for (std::uint64_t p = 16; p < 26; ++p) {
            t.records.push_back({Op::Write, p * kPageBytes, 2});
            t.records.push_back({Op::Read, p * kPageBytes, 2});
        }
        const SimStats s = run(t, c);
        if (s.invalidation_refaults != 0 || s.invalidated_pages != 0) {
            detail = "KeepStronger: " +
                     std::to_string(s.invalidation_refaults) + " refaults, " +
                     std::to_string(s.invalidated_pages) + " invalidations";
            return false;
        }
    }

    // (b) SwitchAndInvalidate over a fully overlapping working set of 10
    // pages: exactly 10 invalidations, one refault per first re-access.
    {
        SimConfig c;
        c.policy.mode = BankMode::FlagDriven;
        c.policy.schedule.transition = TransitionPolicy::SwitchAndInvalidate;
        c.policy.schedule.phases.push_back({1.0 / 3, SecurityLevel::High, {}});
        c.policy.schedule.phases.push_back({2.0 / 3, SecurityLevel::Low, {}});
        c.sleep_at_records = {10}; // land the phase-1 writes in the array

        Trace t;
        for (std::uint64_t p = 0; p < 10; ++p)
            t.records.push_back({Op::Write, p * kPageBytes, 2});
        for (int pass = 0; pass < 2; ++pass) // each page re-read twice
            for (std::uint64_t p = 0; p < 10; ++p)
                t.records.push_back({Op::Read, p * kPageBytes, 2});

        const RunResult r = runSimulation(t, c);
        if (r.stats.invalidated_pages != 10 ||
            r.stats.invalidation_refaults != 10) {
            detail = "SwitchAndInvalidate: " +
                     std::to_string(r.stats.invalidated_pages) +
                     " invalidations, " +
                     std::to_string(r.stats.invalidation_refaults) +
                     " refaults (want 10/10)";
            return false;
        }
        // Refilled data must still be correct.
        const auto ref = referenceReplay(t);
        for (const auto& [page, plain] : ref)
            if (r.artifacts.recovered_plain.at(page) != plain) {
                detail = "refilled page lost data";
                return false;
            }
    }
    detail = "0 refaults disjoint; 10 invalidations + 10 refaults overlapping";
    return true;
}

bool functionalCorrectness(std::string& detail) {
    std::uint64_t checked = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const Trace t = smallTrace(seed, 300);
        const auto ref = referenceReplay(t);
        const bool with_dram = seed % 2 == 0;
        SimConfig c = configFor(kAllAlgs[seed % 4], with_dram);
        if (seed % 5 == 0) c.sleep_at_records = {150};
        const RunResult r = runSimulation(t, c);
        for (const auto& [page, plain] : ref) {
            ++checked;
            const auto it = r.artifacts.recovered_plain.find(page);
            if (it == r.artifacts.recovered_plain.end() ||
                it->second != plain) {
                detail = "trace seed " + std::to_string(seed) + " page " +
                         std::to_string(page) + " diverged from the replay";
                return false;
            }
        }
    }
    detail = "100 traces, " + std::to_string(checked) + " pages exact";
    return true;
}

} // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";

    const Trace mcf = generatePreset("mcf-like", 1);
    const Trace milc = generatePreset("milc-like", 1);

    criterion(1, "zero extra writes across algorithms", zeroExtraWrites);
    criterion(2, "engine equals the closed-form single-bank oracle",
              oracleEquivalence);
    criterion(3, "crypto soundness and at-rest plaintext detection",
              [&](std::string& d) { return cryptoSoundness(cli, d); });
    criterion(4, "decrypt-once reads and write combining",
              decryptOnceAndCombining);
    criterion(5, "overhead ordering none < DES < AES < RSA",
              [&](std::string& d) { return overheadOrdering(mcf, d); });
    criterion(6, "DRAM buffer cache trends on both presets",
              [&](std::string& d) { return dramTrends(mcf, milc, d); });
    criterion(7, "mixed schedule bounded by all-DES and all-RSA",
              [&](std::string& d) { return differentiatedBound(mcf, milc, d); });
    criterion(8, "session key lifecycle", keyLifecycle);
    criterion(9, "phase-transition alternatives", phaseTransitionAlternatives);
    criterion(10, "functional correctness against the reference replay",
              functionalCorrectness);

    return g_failures == 0 ? 0 : 1;
}
