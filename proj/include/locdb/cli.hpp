#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "locdb/analytic.hpp"
#include "locdb/csv.hpp"
#include "locdb/overlap.hpp"
#include "locdb/params.hpp"

namespace locdb {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitModel = 2;

/// Parses argv, runs exactly one subcommand and writes results to `out`
/// (or to --output). Diagnostics go to `err`. Returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct TTreeBenchOptions {
    std::size_t keys = 100000;
    std::size_t probes = 20000;
    std::uint64_t seed = 1;
};

/// Empty `levels`/`indexes` mean all of them.
struct AnalyzeOptions {
    std::vector<double> rho;
    std::vector<int> levels;
    std::vector<IndexChoice> indexes;
    TTreeBenchOptions ttree;
};

CsvTable analyze_table(const SystemParams& p, const AnalyzeOptions& o);

struct SimulateOptions {
    std::vector<double> rho;
    IndexChoice index = IndexChoice::MemoryDirect;
    double horizon_s = 500.0;
    std::uint64_t seed = 1;
    TTreeBenchOptions ttree;
};

CsvTable simulate_table(const SystemParams& p, const SimulateOptions& o);

struct BenchOptions {
    std::vector<IndexChoice> indexes;
    std::size_t keys = 100000;
    std::size_t probes = 100000;
    std::uint64_t seed = 1;
};

CsvTable bench_table(const SystemParams& p, const BenchOptions& o);

/// Every quantity `report` prints, straight from the library.
struct ReportValues {
    WorkloadRates workload;
    LevelRates rates;
    QueueStats db0, db1, db2;  ///< memory-resident direct files
    std::optional<LevelDelays> delays;
    std::optional<double> T_u, T_d;
};

ReportValues report_values(const SystemParams& p);
/// Aligned table, 4 significant digits.
std::string format_report(const ReportValues& r);
/// quantity,value,unit with full precision.
CsvTable report_table(const ReportValues& r);

/// Protocol steps and probe calls of one scenario, merged in time order.
FlowTrace scenario_trace(const ScenarioRun& run);

}  // namespace locdb
