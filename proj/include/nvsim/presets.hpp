#ifndef NVSIM_PRESETS_HPP
#define NVSIM_PRESETS_HPP

#include <string>
#include <vector>

#include "nvsim/trace.hpp"

namespace nvsim {

/// Named synthetic workloads with frozen shape constants:
///  - "mcf-like":   pointer-chasing style reuse; a DRAM buffer cache
///                  filters the majority of its PCM traffic.
///  - "milc-like":  streaming over a footprint far beyond DRAM capacity
///                  with a small hot set; the cache filters little.
///  - "uniform":    uniform random pages, mixed read/write.
///  - "streaming":  one sequential pass, line by line.
Trace generatePreset(const std::string& name, std::uint64_t seed);

std::vector<std::string> presetNames();

} // namespace nvsim

#endif
