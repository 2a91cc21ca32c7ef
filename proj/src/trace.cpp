#include "nvsim/trace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "nvsim/crypto.hpp"
#include "nvsim/rng.hpp"

namespace nvsim {

void SyntheticParams::validate(std::uint64_t capacity_bytes) const {
    if (footprint_pages == 0)
        throw SimError(ErrorCode::InvalidParams, "footprint_pages must be > 0");
    if (write_fraction < 0.0 || write_fraction > 1.0)
        throw SimError(ErrorCode::InvalidParams,
                       "write_fraction must be in [0,1]");
    if (locality_alpha < 0.0)
        throw SimError(ErrorCode::InvalidParams, "locality_alpha must be >= 0");
    if (page_stride == 0)
        throw SimError(ErrorCode::InvalidParams, "page_stride must be > 0");
    const std::uint64_t last_page =
        base_page + (footprint_pages - 1) * page_stride;
    if ((last_page + 1) * kPageBytes > capacity_bytes)
        throw SimError(ErrorCode::InvalidParams,
                       "footprint exceeds configured PCM capacity");
}

namespace {

bool parseHexAddress(const std::string& tok, std::uint64_t& out) {
    if (tok.size() < 3 || tok.size() > 18) return false;
    if (tok[0] != '0' || (tok[1] != 'x' && tok[1] != 'X')) return false;
    std::uint64_t v = 0;
    for (std::size_t i = 2; i < tok.size(); ++i) {
        const char c = tok[i];
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
        else return false;
        v = (v << 4) | static_cast<std::uint64_t>(d);
    }
    out = v;
    return true;
}

bool parseDecimal(const std::string& tok, std::uint64_t& out) {
    if (tok.empty() || tok.size() > 19) return false;
    std::uint64_t v = 0;
    for (char c : tok) {
        if (c < '0' || c > '9') return false;
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    out = v;
    return true;
}

} // namespace

Trace parseTrace(std::istream& input) {
    Trace trace;
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(input, line)) {
        ++lineno;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;

        std::istringstream fields(line);
        std::string op_tok, addr_tok, gap_tok, extra;
        fields >> op_tok >> addr_tok >> gap_tok;
        const auto fail = [&](const std::string& why) -> SimError {
            return SimError(ErrorCode::MalformedLine,
                            "trace line " + std::to_string(lineno) + ": " + why);
        };
        if (fields.fail()) throw fail("expected 3 fields `OP ADDR GAP`");
        if (fields >> extra) throw fail("trailing field");

        AccessRecord rec;
        if (op_tok == "R") rec.op = Op::Read;
        else if (op_tok == "W") rec.op = Op::Write;
        else throw fail("unknown op `" + op_tok + "`");

        if (!parseHexAddress(addr_tok, rec.address))
            throw fail("bad address `" + addr_tok + "`");
        if (rec.address % Trace::kLineSize != 0)
            throw fail("address not 64 B aligned");
        if (!parseDecimal(gap_tok, rec.gap_cycles))
            throw fail("bad gap `" + gap_tok + "`");

        trace.records.push_back(rec);
    }
    return trace;
}

Trace parseTraceFile(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw SimError(ErrorCode::IoError, "cannot open trace file " + path);
    return parseTrace(in);
}

void serializeTrace(const Trace& trace, std::ostream& out) {
    out << "# nvmtrace v1\n";
    char buf[48];
    for (const auto& rec : trace.records) {
        std::snprintf(buf, sizeof(buf), "%c 0x%llx %llu\n",
                      rec.op == Op::Read ? 'R' : 'W',
                      static_cast<unsigned long long>(rec.address),
                      static_cast<unsigned long long>(rec.gap_cycles));
        out << buf;
    }
}

void writeTraceFile(const Trace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw SimError(ErrorCode::IoError, "cannot write trace file " + path);
    serializeTrace(trace, out);
}

namespace {

/// Cumulative Zipf(alpha) weights over n ranks; alpha = 0 is uniform.
std::vector<double> zipfCumulative(std::uint64_t n, double alpha) {
    std::vector<double> cum(n);
    double total = 0.0;
    for (std::uint64_t k = 0; k < n; ++k) {
        total += 1.0 / std::pow(static_cast<double>(k + 1), alpha);
        cum[k] = total;
    }
    for (auto& c : cum) c /= total;
    return cum;
}

std::uint64_t sampleGeometric(Rng& rng, std::uint64_t mean) {
    if (mean == 0) return 0;
    const double p = 1.0 / (static_cast<double>(mean) + 1.0);
    const double u = rng.nextDouble();
    // Support {0,1,...} with E = (1-p)/p = mean.
    return static_cast<std::uint64_t>(
        std::floor(std::log1p(-u) / std::log1p(-p)));
}

} // namespace

Trace generateSynthetic(const SyntheticParams& params) {
    params.validate(~std::uint64_t{0}); // caller re-validates against capacity
    Trace trace;
    trace.records.reserve(params.num_requests);
    if (params.num_requests == 0) return trace;

    Rng rng(params.seed);
    const auto cum = zipfCumulative(params.footprint_pages, params.locality_alpha);

    for (std::uint64_t i = 0; i < params.num_requests; ++i) {
        const double u = rng.nextDouble();
        const auto it = std::lower_bound(cum.begin(), cum.end(), u);
        const std::uint64_t rank =
            static_cast<std::uint64_t>(it - cum.begin());
        const std::uint64_t page =
            params.base_page + rank * params.page_stride;
        const std::uint64_t line = rng.nextBelow(kLinesPerPage);

        AccessRecord rec;
        rec.address = page * kPageBytes + line * kLineBytes;
        rec.op = rng.nextDouble() < params.write_fraction ? Op::Write : Op::Read;
        rec.gap_cycles = sampleGeometric(rng, params.mean_gap_cycles);
        trace.records.push_back(rec);
    }
    return trace;
}

TraceStats traceStats(const Trace& trace) {
    TraceStats stats;
    std::unordered_set<std::uint64_t> pages;
    for (const auto& rec : trace.records) {
        if (rec.op == Op::Read) ++stats.reads;
        else ++stats.writes;
        pages.insert(rec.address / kPageBytes);
    }
    stats.unique_pages = pages.size();
    stats.footprint_bytes = stats.unique_pages * kPageBytes;
    return stats;
}

} // namespace nvsim
