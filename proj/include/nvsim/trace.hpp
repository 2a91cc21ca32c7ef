#ifndef NVSIM_TRACE_HPP
#define NVSIM_TRACE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nvsim/error.hpp"

namespace nvsim {

enum class Op : std::uint8_t { Read, Write };

/// One post-LLC memory request: a 64 B line access plus the CPU-cycle
/// gap since the previous record was issued.
struct AccessRecord {
    Op op = Op::Read;
    std::uint64_t address = 0; // byte address, 64 B aligned
    std::uint64_t gap_cycles = 0;

    bool operator==(const AccessRecord&) const = default;
};

struct Trace {
    static constexpr std::uint64_t kLineSize = 64;

    std::vector<AccessRecord> records;

    bool operator==(const Trace&) const = default;
};

struct TraceStats {
    std::uint64_t reads = 0;
    std::uint64_t writes = 0;
    std::uint64_t unique_pages = 0;
    std::uint64_t footprint_bytes = 0;
};

struct SyntheticParams {
    std::uint64_t num_requests = 0;
    std::uint64_t footprint_pages = 1;
    double locality_alpha = 0.0; // Zipf skew over pages
    double write_fraction = 0.0;
    std::uint64_t mean_gap_cycles = 0;
    std::uint64_t seed = 0;
    std::uint64_t base_page = 0;   // first page of the footprint
    std::uint64_t page_stride = 1; // distance between footprint pages

    void validate(std::uint64_t capacity_bytes) const;
};

/// Parses the `# nvmtrace v1` text format. Comment and blank lines are
/// skipped; any malformed line raises MalformedLine with its number.
Trace parseTrace(std::istream& input);
Trace parseTraceFile(const std::string& path);

void serializeTrace(const Trace& trace, std::ostream& out);
void writeTraceFile(const Trace& trace, const std::string& path);

/// Seeded synthetic workload: Zipf(alpha) page selection over the
/// footprint, uniform line within page, Bernoulli write op, geometric
/// gaps. Deterministic for a fixed seed.
Trace generateSynthetic(const SyntheticParams& params);

TraceStats traceStats(const Trace& trace);

} // namespace nvsim

#endif
