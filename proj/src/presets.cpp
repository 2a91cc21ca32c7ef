#include "nvsim/presets.hpp"

#include "nvsim/crypto.hpp"
#include "nvsim/rng.hpp"

namespace nvsim {

namespace {

std::uint64_t lineAddress(std::uint64_t page, std::uint64_t line) {
    return page * kPageBytes + line * kLineBytes;
}

/// Mixture workload: with probability `p_hot` touch a small reusable
/// hot set, otherwise advance a page-granularity scan that never
/// revisits a page. Hot and scan streams carry separate write ratios.
struct MixtureParams {
    std::uint64_t num_requests;
    std::uint64_t hot_pages;
    std::uint64_t hot_base_page;
    std::uint64_t scan_base_page;
    std::uint64_t scan_pages;
    double p_hot;
    double hot_write_fraction;
    double scan_write_fraction;
    std::uint64_t mean_gap;
};

Trace generateMixture(const MixtureParams& p, std::uint64_t seed) {
    Rng rng(seed);
    Trace trace;
    trace.records.reserve(p.num_requests);
    std::uint64_t scan_pos = 0;
    for (std::uint64_t i = 0; i < p.num_requests; ++i) {
        AccessRecord rec;
        rec.gap_cycles = p.mean_gap == 0
                             ? 0
                             : rng.nextBelow(2 * p.mean_gap + 1);
        if (rng.nextDouble() < p.p_hot) {
            const std::uint64_t page =
                p.hot_base_page + rng.nextBelow(p.hot_pages);
            const std::uint64_t line = rng.nextBelow(kLinesPerPage);
            rec.address = lineAddress(page, line);
            rec.op = rng.nextDouble() < p.hot_write_fraction ? Op::Write
                                                             : Op::Read;
        } else {
            const std::uint64_t page =
                p.scan_base_page + (scan_pos % p.scan_pages);
            ++scan_pos;
            rec.address = lineAddress(page, scan_pos % kLinesPerPage);
            rec.op = rng.nextDouble() < p.scan_write_fraction ? Op::Write
                                                              : Op::Read;
        }
        trace.records.push_back(rec);
    }
    return trace;
}

} // namespace

Trace generatePreset(const std::string& name, std::uint64_t seed) {
    if (name == "mcf-like") {
        // Heavy reuse of a small hot set: a DRAM buffer cache absorbs
        // roughly the hot fraction of PCM traffic.
        MixtureParams p;
        p.num_requests = 200000;
        p.hot_pages = 256;
        p.hot_base_page = 0;
        p.scan_base_page = 8192;
        p.scan_pages = (1 << 20) - 8192; // rest of a 4 GiB PCM
        p.p_hot = 0.63;
        p.hot_write_fraction = 0.05;
        p.scan_write_fraction = 0.0;
        p.mean_gap = 4;
        return generateMixture(p, seed);
    }
    if (name == "milc-like") {
        // Streaming-dominated: the scan working set dwarfs any cache,
        // so a DRAM buffer cache filters only the small hot fraction.
        MixtureParams p;
        p.num_requests = 120000;
        p.hot_pages = 64;
        p.hot_base_page = 0;
        p.scan_base_page = 8192;
        p.scan_pages = (1 << 20) - 8192;
        p.p_hot = 0.45;
        p.hot_write_fraction = 0.0;
        p.scan_write_fraction = 0.60;
        p.mean_gap = 2000;
        return generateMixture(p, seed);
    }
    if (name == "uniform") {
        SyntheticParams p;
        p.num_requests = 100000;
        p.footprint_pages = 8192;
        p.locality_alpha = 0.0;
        p.write_fraction = 0.3;
        p.mean_gap_cycles = 4;
        p.seed = seed;
        return generateSynthetic(p);
    }
    if (name == "streaming") {
        Trace trace;
        const std::uint64_t pages = 2048;
        trace.records.reserve(pages * kLinesPerPage);
        for (std::uint64_t page = 0; page < pages; ++page)
            for (std::uint64_t line = 0; line < kLinesPerPage; ++line) {
                AccessRecord rec;
                rec.op = Op::Read;
                rec.address = lineAddress(page, line);
                rec.gap_cycles = 1;
                trace.records.push_back(rec);
            }
        return trace;
    }
    throw SimError(ErrorCode::InvalidParams, "unknown preset: " + name);
}

std::vector<std::string> presetNames() {
    return {"mcf-like", "milc-like", "uniform", "streaming"};
}

} // namespace nvsim
