#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nvsim/config.hpp"
#include "nvsim/engine.hpp"
#include "nvsim/presets.hpp"
#include "nvsim/trace.hpp"

namespace {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

LogLevel logLevel() {
    static const LogLevel level = [] {
        const char* env = std::getenv("NVSIM_LOG");
        if (!env) return LogLevel::Error;
        const std::string v(env);
        if (v == "debug") return LogLevel::Debug;
        if (v == "info") return LogLevel::Info;
        if (v == "error") return LogLevel::Error;
        std::cerr << "nvsim: ignoring unknown NVSIM_LOG value '" << v << "'\n";
        return LogLevel::Error;
    }();
    return level;
}

void logInfo(const std::string& msg) {
    if (logLevel() >= LogLevel::Info) std::cerr << "[info] " << msg << "\n";
}

void logDebug(const std::string& msg) {
    if (logLevel() >= LogLevel::Debug) std::cerr << "[debug] " << msg << "\n";
}

struct GlobalOpts {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
};

nvsim::LoadedConfig loadConfig(const GlobalOpts& opts) {
    nvsim::LoadedConfig loaded;
    if (!opts.config_path.empty()) {
        loaded = nvsim::loadConfigFile(opts.config_path);
        logInfo("loaded config " + opts.config_path);
    }
    if (opts.seed) loaded.config.rng_seed = *opts.seed;
    return loaded;
}

void writeText(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw nvsim::SimError(nvsim::ErrorCode::IoError,
                              "cannot write " + path);
    out << text;
    if (!out)
        throw nvsim::SimError(nvsim::ErrorCode::IoError,
                              "write failed: " + path);
}

// ---- gen-trace ----------------------------------------------------------

int cmdGenTrace(const GlobalOpts& opts, const std::string& preset,
                const nvsim::SyntheticParams& raw, bool have_raw) {
    if (opts.out_path.empty())
        throw nvsim::SimError(nvsim::ErrorCode::InvalidParams,
                              "gen-trace requires --out");
    nvsim::Trace trace;
    const std::uint64_t seed = opts.seed.value_or(1);
    if (!preset.empty()) {
        trace = nvsim::generatePreset(preset, seed);
    } else if (have_raw) {
        nvsim::SyntheticParams params = raw;
        params.seed = seed;
        const auto capacity = loadConfig(opts).config.pcm.capacity_bytes;
        params.validate(capacity);
        trace = nvsim::generateSynthetic(params);
    } else {
        throw nvsim::SimError(nvsim::ErrorCode::InvalidParams,
                              "gen-trace needs --preset or --num-requests");
    }
    nvsim::writeTraceFile(trace, opts.out_path);
    const auto stats = nvsim::traceStats(trace);
    std::cout << "records " << trace.records.size() << "\n"
              << "reads " << stats.reads << "\n"
              << "writes " << stats.writes << "\n"
              << "unique_pages " << stats.unique_pages << "\n"
              << "footprint_bytes " << stats.footprint_bytes << "\n";
    return 0;
}

// ---- run -----------------------------------------------------------------

int cmdRun(const GlobalOpts& opts, const std::string& trace_path,
           const std::string& baseline_path,
           const std::string& snapshot_path, const std::string& csv_path) {
    const auto loaded = loadConfig(opts);
    const nvsim::Trace trace = nvsim::parseTraceFile(trace_path);
    logInfo("running " + std::to_string(trace.records.size()) + " records");

    const nvsim::RunResult result = nvsim::runSimulation(trace, loaded.config);

    nvsim::RunReport report;
    report.config_digest = loaded.digest;
    report.stats = result.stats;
    if (!baseline_path.empty()) {
        const auto baseline = nvsim::loadReportFile(baseline_path);
        report.overheads = nvsim::compare(report.stats, baseline.stats);
    }

    const std::string doc = nvsim::reportToJson(report);
    if (opts.out_path.empty())
        std::cout << doc;
    else
        writeText(opts.out_path, doc);
    if (!csv_path.empty()) writeText(csv_path, nvsim::reportToCsv(report));
    if (!snapshot_path.empty())
        writeText(snapshot_path, nvsim::snapshotToJson(result.artifacts));
    logDebug("exec_cycles " + std::to_string(result.stats.exec_cycles));
    return 0;
}

// ---- compare -------------------------------------------------------------

int cmdCompare(const GlobalOpts& opts, const std::string& run_path,
               const std::string& baseline_path) {
    const auto run = nvsim::loadReportFile(run_path);
    const auto baseline = nvsim::loadReportFile(baseline_path);
    const auto ov = nvsim::compare(run.stats, baseline.stats);
    std::ostringstream table;
    table << "metric,overhead_pct\n"
          << "perf," << ov.perf_pct << "\n"
          << "power," << ov.power_pct << "\n";
    std::cout << table.str();
    if (!opts.out_path.empty()) writeText(opts.out_path, table.str());
    return 0;
}

// ---- sweep ---------------------------------------------------------------

struct Axis {
    std::string section;
    std::string key;
    std::vector<std::string> values;
};

std::vector<Axis> parseAxes(const std::string& spec) {
    std::vector<Axis> axes;
    std::istringstream stream(spec);
    std::string part;
    while (std::getline(stream, part, ';')) {
        if (part.empty()) continue;
        const auto eq = part.find('=');
        const auto dot = part.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq)
            throw nvsim::SimError(
                nvsim::ErrorCode::InvalidParams,
                "axis must be 'section.key=v1,v2,...': " + part);
        Axis axis;
        axis.section = part.substr(0, dot);
        axis.key = part.substr(dot + 1, eq - dot - 1);
        std::istringstream values(part.substr(eq + 1));
        std::string value;
        while (std::getline(values, value, ','))
            axis.values.push_back(value);
        if (axis.values.empty())
            throw nvsim::SimError(nvsim::ErrorCode::InvalidParams,
                                  "axis has no values: " + part);
        axes.push_back(std::move(axis));
    }
    return axes;
}

int cmdSweep(const GlobalOpts& opts, const std::string& trace_path,
             const std::string& axes_spec) {
    const auto loaded = loadConfig(opts);
    const nvsim::Trace trace = nvsim::parseTraceFile(trace_path);
    const std::vector<Axis> axes = parseAxes(axes_spec);

    std::size_t cells = 1;
    for (const auto& axis : axes) cells *= axis.values.size();

    struct Cell {
        std::vector<std::string> values; // one per axis
        nvsim::SimConfig config;
    };
    std::vector<Cell> grid;
    grid.reserve(cells);
    for (std::size_t cell = 0; cell < cells; ++cell) {
        Cell c;
        c.config = loaded.config;
        std::size_t rest = cell;
        for (const auto& axis : axes) {
            const std::string& value = axis.values[rest % axis.values.size()];
            rest /= axis.values.size();
            nvsim::applyConfigKey(c.config, axis.section, axis.key, value);
            c.values.push_back(value);
        }
        grid.push_back(std::move(c));
    }

    // One unencrypted baseline per distinct non-crypto configuration.
    std::map<std::uint64_t, nvsim::SimStats> baselines;
    for (const auto& cell : grid) {
        const std::uint64_t key = cell.config.baselineDigest();
        if (baselines.contains(key)) continue;
        nvsim::SimConfig base = cell.config;
        base.policy = nvsim::PolicyConfig{};
        logDebug("baseline run for digest " + std::to_string(key));
        baselines.emplace(key, nvsim::run(trace, base));
    }

    std::vector<std::future<nvsim::SimStats>> futures;
    futures.reserve(grid.size());
    for (const auto& cell : grid)
        futures.push_back(std::async(std::launch::async, [&trace, &cell] {
            return nvsim::run(trace, cell.config);
        }));

    std::ostringstream csv;
    csv << "format_version";
    for (const auto& axis : axes) csv << ',' << axis.section << '.' << axis.key;
    csv << ",exec_cycles,total_energy,avg_power,pcm_accesses,"
           "perf_overhead_pct,power_overhead_pct\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const nvsim::SimStats stats = futures[i].get();
        const auto& baseline = baselines.at(grid[i].config.baselineDigest());
        const auto ov = nvsim::compare(stats, baseline);
        csv << 1;
        for (const auto& value : grid[i].values) csv << ',' << value;
        csv << ',' << stats.exec_cycles << ',' << stats.totalEnergy() << ','
            << stats.avgPower() << ',' << stats.pcmAccesses() << ','
            << ov.perf_pct << ',' << ov.power_pct << "\n";
    }
    if (opts.out_path.empty())
        std::cout << csv.str();
    else
        writeText(opts.out_path, csv.str());
    return 0;
}

// ---- dump-nvm ------------------------------------------------------------

int cmdDumpNvm(const GlobalOpts& opts, const std::string& snapshot_path,
               const std::string& check_trace_path) {
    const auto pages = nvsim::loadSnapshotFile(snapshot_path);
    std::ostringstream listing;
    for (const auto& page : pages) {
        listing << std::hex << "0x" << page.page_index << std::dec << " "
                << nvsim::algorithmName(page.alg);
        listing << std::hex;
        for (std::size_t i = 0; i < nvsim::kPageBytes; ++i) {
            if (i % 32 == 0) listing << "\n  ";
            listing << (page.raw.bytes[i] >> 4 ? "" : "0")
                    << static_cast<unsigned>(page.raw.bytes[i]);
        }
        listing << std::dec << "\n";
    }
    if (opts.out_path.empty())
        std::cout << listing.str();
    else
        writeText(opts.out_path, listing.str());

    if (check_trace_path.empty()) return 0;

    const nvsim::Trace trace = nvsim::parseTraceFile(check_trace_path);
    const auto reference = nvsim::referenceReplay(trace);
    std::uint64_t matches = 0;
    for (const auto& page : pages) {
        const auto it = reference.find(page.page_index);
        if (it != reference.end() && it->second == page.raw) {
            std::cerr << "plaintext leak: page 0x" << std::hex
                      << page.page_index << std::dec << " stored in the clear\n";
            ++matches;
        }
    }
    if (matches > 0) return 1;
    std::cout << "check-plaintext: no page stored in the clear\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Secure non-volatile main memory simulator"};
    app.require_subcommand(1);

    GlobalOpts opts;
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "RNG seed override");
    app.add_option("--config", opts.config_path, "config file path");
    app.add_option("--out", opts.out_path, "output file path");

    auto* gen = app.add_subcommand("gen-trace", "generate a synthetic trace");
    gen->fallthrough(); // global flags may follow the subcommand name
    std::string preset;
    nvsim::SyntheticParams raw;
    gen->add_option("--preset", preset, "workload preset");
    auto* nreq = gen->add_option("--num-requests", raw.num_requests);
    gen->add_option("--footprint-pages", raw.footprint_pages);
    gen->add_option("--alpha", raw.locality_alpha);
    gen->add_option("--write-fraction", raw.write_fraction);
    gen->add_option("--mean-gap", raw.mean_gap_cycles);
    gen->add_option("--base-page", raw.base_page);
    gen->add_option("--page-stride", raw.page_stride);

    auto* run = app.add_subcommand("run", "run one simulation");
    run->fallthrough();
    std::string trace_path, baseline_path, snapshot_path, csv_path;
    run->add_option("--trace", trace_path, "trace file")->required();
    run->add_option("--baseline", baseline_path,
                    "baseline report for overhead computation");
    run->add_option("--snapshot", snapshot_path, "raw-NVM snapshot output");
    run->add_option("--csv", csv_path, "flat counters table output");

    auto* cmp = app.add_subcommand("compare", "overheads of run vs baseline");
    cmp->fallthrough();
    std::string cmp_run, cmp_base;
    cmp->add_option("run_report", cmp_run, "encrypted-run report")->required();
    cmp->add_option("baseline_report", cmp_base, "baseline report")
        ->required();

    auto* sweep = app.add_subcommand("sweep", "cross-product parameter sweep");
    sweep->fallthrough();
    std::string sweep_trace, axes_spec;
    sweep->add_option("--trace", sweep_trace, "trace file")->required();
    sweep->add_option("--axes", axes_spec,
                      "axis spec: section.key=v1,v2;section.key=...")
        ->required();

    auto* dump = app.add_subcommand("dump-nvm", "hex-dump a raw-NVM snapshot");
    dump->fallthrough();
    std::string dump_snapshot, check_trace;
    dump->add_option("snapshot", dump_snapshot, "snapshot file")->required();
    dump->add_option("--check-plaintext", check_trace,
                     "trace whose replayed plaintext must not appear in "
                     "protected pages");

    try {
        app.parse(argc, argv);
        if (seed_opt->count() > 0) opts.seed = seed_value;
        if (gen->parsed())
            return cmdGenTrace(opts, preset, raw, nreq->count() > 0);
        if (run->parsed())
            return cmdRun(opts, trace_path, baseline_path, snapshot_path,
                          csv_path);
        if (cmp->parsed()) return cmdCompare(opts, cmp_run, cmp_base);
        if (sweep->parsed()) return cmdSweep(opts, sweep_trace, axes_spec);
        if (dump->parsed()) return cmdDumpNvm(opts, dump_snapshot, check_trace);
        return 2;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const nvsim::SimError& e) {
        std::cerr << "nvsim: " << nvsim::errorCodeName(e.code()) << ": "
                  << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "nvsim: internal error: " << e.what() << "\n";
        return 2;
    }
}
