#include "locdb/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "locdb/desim.hpp"
#include "locdb/error.hpp"
#include "locdb/index/direct_file.hpp"
#include "locdb/index/service_time.hpp"

namespace locdb {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr double kUs = 1e6;
constexpr double kUs2 = 1e12;

constexpr IndexChoice kAllIndexes[] = {IndexChoice::MemoryDirect, IndexChoice::TTreeIndex,
                                       IndexChoice::DiskDirect};

SystemParams at_density(const SystemParams& p, double rho) {
    SystemParams q = p;
    q.rho = rho;
    q.validate();
    return q;
}

std::vector<double> sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::string response_cell(const QueueStats& s) {
    try {
        return format_full(pk_response_time(s) * kUs);
    } catch (const SaturationError&) {
        return std::string(kSaturated);
    }
}

std::vector<double> ttree_probe_costs(const SystemParams& p, const TTreeBenchOptions& o) {
    auto work = make_uniform_ttree_workload(p, o.keys, o.probes, o.seed);
    return probe_costs(work.tree, work.probes, CostModel::ttree(p));
}

std::vector<std::string> stats_cells(double rho, int level, IndexChoice c, const QueueStats& s) {
    return {format_full(rho),
            std::to_string(level),
            std::string(to_string(c)),
            format_full(s.arrival_rate),
            format_full(s.mean_service * kUs),
            format_full(s.var_service * kUs2),
            response_cell(s)};
}

std::vector<std::string> split_header(std::string_view h) { return split_csv_line(h); }

}  // namespace

// ---------------------------------------------------------------------------
// Tables

CsvTable analyze_table(const SystemParams& p, const AnalyzeOptions& o) {
    if (o.rho.empty()) {
        throw ConfigError("analyze needs at least one density");
    }
    std::vector<int> levels = o.levels.empty() ? std::vector<int>{0, 1, 2} : o.levels;
    std::vector<IndexChoice> indexes =
        o.indexes.empty() ? std::vector<IndexChoice>(std::begin(kAllIndexes), std::end(kAllIndexes)) : o.indexes;

    std::optional<ServiceTimeEstimate> est;
    if (std::find(indexes.begin(), indexes.end(), IndexChoice::TTreeIndex) != indexes.end()) {
        est = summarize(ttree_probe_costs(p, o.ttree));
    }

    CsvTable t;
    t.header = split_header(kAnalyzeHeader);
    for (double rho : sorted(o.rho)) {
        const SystemParams q = at_density(p, rho);
        const WorkloadRates w = workload_rates(q);
        for (int level : levels) {
            for (IndexChoice c : indexes) {
                const QueueStats s = level_queue_stats(q, w, level, c, est ? &*est : nullptr);
                t.rows.push_back(stats_cells(rho, level, c, s));
            }
        }
    }
    return t;
}

CsvTable simulate_table(const SystemParams& p, const SimulateOptions& o) {
    if (o.rho.empty()) {
        throw ConfigError("simulate needs at least one density");
    }
    SimConfig cfg;
    cfg.horizon_s = o.horizon_s;
    cfg.seed = o.seed;
    cfg.choices = {o.index, o.index, o.index};
    std::optional<ServiceTimeEstimate> est;
    if (o.index == IndexChoice::TTreeIndex) {
        const auto costs = ttree_probe_costs(p, o.ttree);
        est = summarize(costs);
        cfg.ttree_costs = {costs, costs, costs};
    }

    CsvTable t;
    t.header = split_header(kSimulateHeader);
    for (double rho : sorted(o.rho)) {
        const SystemParams q = at_density(p, rho);
        const WorkloadRates w = workload_rates(q);
        std::optional<SimMetrics> m;
        try {
            m = run_simulation(q, cfg);
        } catch (const SaturationError&) {
        }
        for (int level = 0; level < 3; ++level) {
            const QueueStats s = level_queue_stats(q, w, level, o.index, est ? &*est : nullptr);
            auto row = stats_cells(rho, level, o.index, s);
            if (m) {
                row.push_back(format_full(m->levels[level].mean_response * kUs));
                row.push_back(format_full(m->levels[level].ci_halfwidth * kUs));
                row.push_back(format_full(m->T_u * kUs));
                row.push_back(format_full(m->T_d * kUs));
            } else {
                row.insert(row.end(), 4, std::string(kSaturated));
            }
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

CsvTable bench_table(const SystemParams& p, const BenchOptions& o) {
    if (o.keys == 0 || o.probes == 0) {
        throw ConfigError("bench-index needs keys > 0 and probes > 0");
    }
    std::vector<IndexChoice> indexes =
        o.indexes.empty() ? std::vector<IndexChoice>(std::begin(kAllIndexes), std::end(kAllIndexes)) : o.indexes;
    CsvTable t;
    t.header = split_header(kBenchHeader);
    for (IndexChoice c : indexes) {
        ServiceTimeEstimate est;
        if (c == IndexChoice::TTreeIndex) {
            est = summarize(ttree_probe_costs(p, {o.keys, o.probes, o.seed}));
        } else {
            const Residency r = c == IndexChoice::DiskDirect ? Residency::Disk : Residency::Memory;
            DirectFile file(0, o.keys, r);
            for (Ptn k = 0; k < o.keys; ++k) {
                file.put(k, k);
            }
            std::mt19937_64 rng(o.seed);
            std::uniform_int_distribution<Ptn> pick(0, o.keys - 1);
            std::vector<Ptn> probes(o.probes);
            for (auto& k : probes) {
                k = pick(rng);
            }
            est = measure_service_time(file, probes, CostModel::direct_file(p, r));
        }
        t.rows.push_back({std::string(to_string(c)), std::to_string(o.keys), std::to_string(o.probes),
                          format_full(est.mean * kUs), format_full(est.variance * kUs2)});
    }
    return t;
}

ReportValues report_values(const SystemParams& p) {
    ReportValues r;
    r.workload = workload_rates(p);
    r.rates = arrival_rates(p, r.workload);
    r.db0 = service_db0_memdirect(p, r.workload);
    r.db1 = service_db1_memdirect(p, r.workload);
    r.db2 = service_db2_memdirect(p, r.workload);
    try {
        r.delays = LevelDelays{pk_response_time(r.db0), pk_response_time(r.db1), pk_response_time(r.db2)};
        r.T_u = update_delay(*r.delays, p.q0, p.q1);
        r.T_d = delivery_delay(*r.delays, p.p0, p.p1, p.p2);
    } catch (const SaturationError&) {
    }
    return r;
}

namespace {

struct ReportRow {
    std::string quantity;
    std::optional<double> value;
    std::string unit;
};

std::vector<ReportRow> report_rows(const ReportValues& r) {
    const auto opt_us = [](std::optional<double> v) {
        return v ? std::optional<double>(*v * kUs) : std::nullopt;
    };
    return {
        {"lambda_u", r.workload.lambda_u, "1/s"},
        {"lambda_c", r.workload.lambda_c, "1/s"},
        {"lambda_0", r.rates.lambda0, "1/s"},
        {"lambda_1", r.rates.lambda1, "1/s"},
        {"lambda_2", r.rates.lambda2, "1/s"},
        {"E[S0]", r.db0.mean_service * kUs, "us"},
        {"Var[S0]", r.db0.var_service * kUs2, "us^2"},
        {"E[S1]", r.db1.mean_service * kUs, "us"},
        {"Var[S1]", r.db1.var_service * kUs2, "us^2"},
        {"E[S2]", r.db2.mean_service * kUs, "us"},
        {"Var[S2]", r.db2.var_service * kUs2, "us^2"},
        {"T0", opt_us(r.delays ? std::optional(r.delays->T0) : std::nullopt), "us"},
        {"T1", opt_us(r.delays ? std::optional(r.delays->T1) : std::nullopt), "us"},
        {"T2", opt_us(r.delays ? std::optional(r.delays->T2) : std::nullopt), "us"},
        {"T_u", opt_us(r.T_u), "us"},
        {"T_d", opt_us(r.T_d), "us"},
    };
}

}  // namespace

std::string format_report(const ReportValues& r) {
    std::ostringstream out;
    out << std::left << std::setw(10) << "quantity" << std::right << std::setw(12) << "value"
        << "  unit\n";
    for (const auto& row : report_rows(r)) {
        out << std::left << std::setw(10) << row.quantity << std::right << std::setw(12)
            << (row.value ? format_sig(*row.value) : std::string(kSaturated)) << "  " << row.unit << '\n';
    }
    return out.str();
}

CsvTable report_table(const ReportValues& r) {
    CsvTable t;
    t.header = {"quantity", "value", "unit"};
    for (const auto& row : report_rows(r)) {
        t.rows.push_back({row.quantity, row.value ? format_full(*row.value) : std::string(kSaturated), row.unit});
    }
    return t;
}

FlowTrace scenario_trace(const ScenarioRun& run) {
    FlowTrace t = run.trace;
    for (const auto& c : run.call_traces) {
        t.append(c);
    }
    std::stable_sort(t.steps.begin(), t.steps.end(),
                     [](const TraceStep& a, const TraceStep& b) { return a.finish < b.finish; });
    return t;
}

// ---------------------------------------------------------------------------
// Command line

namespace {

std::vector<double> rho_values(const std::string& sweep, const SystemParams& p) {
    if (sweep.empty()) {
        return {p.rho};
    }
    Sweep s;
    try {
        s = parse_sweep(sweep);
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    if (s.name != "rho") {
        throw UsageError("only rho can be swept, got '" + s.name + "'");
    }
    return s.values();
}

std::vector<IndexChoice> index_list(const std::string& text) {
    if (text.empty() || text == "all") {
        return {};
    }
    try {
        return {parse_index_choice(text)};
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
}

SystemParams load_params(const std::string& path) {
    if (path.empty()) {
        return SystemParams{};
    }
    if (!std::filesystem::is_regular_file(path)) {
        throw UsageError("config file not found: " + path);
    }
    return load_config(path);
}

void emit(const std::string& text, const std::string& output, std::ostream& out) {
    if (output.empty()) {
        out << text;
        out.flush();
        if (!out) {
            throw Error("write to standard output failed");
        }
        return;
    }
    std::ofstream file(output, std::ios::binary);
    file << text;
    file.close();
    if (!file) {
        throw Error("cannot write " + output);
    }
}

std::string csv_text(const CsvTable& t) {
    std::ostringstream s;
    write_csv(s, t);
    return s.str();
}

std::size_t saturated_rows(const CsvTable& t) {
    return static_cast<std::size_t>(std::count_if(t.rows.begin(), t.rows.end(), [](const auto& row) {
        return std::find(row.begin(), row.end(), kSaturated) != row.end();
    }));
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Three-level location database performance model", "locdb"};
    app.fallthrough();

    std::string config_path;
    std::string output_path;
    std::uint64_t seed = 1;
    app.add_option("--config", config_path, "Parameter file (key = value lines)");
    app.add_option("--output", output_path, "Write results here instead of standard output");
    app.add_option("--seed", seed, "Random seed");

    std::string sweep;
    std::string index_text;
    std::vector<int> levels;
    TTreeBenchOptions ttree;

    auto* analyze = app.add_subcommand("analyze", "Analytic response time per level and index over a density sweep");
    analyze->add_option("--level", levels, "Database level(s) 0, 1 or 2 (default all)")
        ->check(CLI::Range(0, 2));
    analyze->add_option("--index", index_text, "memory-direct, ttree, disk-direct or all");
    analyze->add_option("--sweep", sweep, "Density sweep, e.g. rho=50:2000:50");
    analyze->add_option("--ttree-keys", ttree.keys, "Keys in the benchmark T-tree")->check(CLI::PositiveNumber);
    analyze->add_option("--ttree-probes", ttree.probes, "Probes for the T-tree estimate")
        ->check(CLI::PositiveNumber);

    double horizon = 500.0;
    auto* simulate = app.add_subcommand("simulate", "Discrete-event simulation next to the analytic values");
    simulate->add_option("--index", index_text, "Index used at every level (default memory-direct)");
    simulate->add_option("--sweep", sweep, "Density sweep, e.g. rho=100:400:100");
    simulate->add_option("--horizon", horizon, "Simulated seconds")->check(CLI::PositiveNumber);
    simulate->add_option("--ttree-keys", ttree.keys, "Keys in the benchmark T-tree")->check(CLI::PositiveNumber);
    simulate->add_option("--ttree-probes", ttree.probes, "Probes for the T-tree estimate")
        ->check(CLI::PositiveNumber);

    BenchOptions bench;
    auto* bench_cmd = app.add_subcommand("bench-index", "Index micro-benchmark and service-time estimate");
    bench_cmd->add_option("--index", index_text, "memory-direct, ttree, disk-direct or all");
    bench_cmd->add_option("--keys", bench.keys, "Stored keys")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--probes", bench.probes, "Lookups measured")->check(CLI::PositiveNumber);

    std::string scenario_text;
    std::string waypoints_path;
    bool in_call = false;
    double speed = 56.0;
    std::optional<int> heading;
    Ptn ptn = 1001;
    std::string rule_text = "ratio";
    auto* overlap = app.add_subcommand("overlap-scenario", "Trace a terminal crossing overlapping coverage");
    overlap->add_option("--scenario", scenario_text, "a (same network), b (two networks), c (several)")
        ->required();
    overlap->add_option("--waypoints", waypoints_path, "Waypoint file: t_s,region_id,speed_kmh,heading_network_id,in_call");
    overlap->add_flag("--in-call", in_call, "Terminal is in a call for the default walk");
    overlap->add_option("--speed", speed, "Speed of the default walk, km/h")->check(CLI::NonNegativeNumber);
    overlap->add_option("--heading", heading, "Network the default walk heads for");
    overlap->add_option("--ptn", ptn, "Terminal PTN");
    overlap->add_option("--rule", rule_text, "Update-condition rule: ratio or lexicographic")
        ->check(CLI::IsMember({"ratio", "lexicographic"}));

    bool report_csv = false;
    auto* report = app.add_subcommand("report", "Rates, service times and delays at the configured parameters");
    report->add_flag("--csv", report_csv, "CSV instead of the aligned table");

    app.require_subcommand(1);

    if (argc <= 1) {
        err << app.help();
        return kExitUsage;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return kExitUsage;
    }

    try {
        const SystemParams p = load_params(config_path);
        ttree.seed = seed;
        if (*analyze) {
            AnalyzeOptions o;
            o.rho = rho_values(sweep, p);
            o.levels = levels;
            o.indexes = index_list(index_text);
            o.ttree = ttree;
            const CsvTable t = analyze_table(p, o);
            emit(csv_text(t), output_path, out);
            if (!output_path.empty()) {
                out << t.rows.size() << " rows written to " << output_path << ", " << saturated_rows(t)
                    << " saturated\n";
            }
        } else if (*simulate) {
            SimulateOptions o;
            o.rho = rho_values(sweep, p);
            const auto idx = index_list(index_text);
            o.index = idx.empty() ? IndexChoice::MemoryDirect : idx.front();
            o.horizon_s = horizon;
            o.seed = seed;
            o.ttree = ttree;
            const CsvTable t = simulate_table(p, o);
            emit(csv_text(t), output_path, out);
            if (!output_path.empty()) {
                out << t.rows.size() << " rows written to " << output_path << "\n";
            }
        } else if (*bench_cmd) {
            bench.indexes = index_list(index_text);
            bench.seed = seed;
            emit(csv_text(bench_table(p, bench)), output_path, out);
        } else if (*overlap) {
            ScenarioKind which;
            try {
                which = parse_scenario_kind(scenario_text);
            } catch (const ProtocolError& e) {
                throw UsageError(e.what());
            }
            const NetworkEnv env = make_scenario_env(which);
            std::vector<Waypoint> walk;
            if (!waypoints_path.empty()) {
                std::ifstream in(waypoints_path);
                if (!in) {
                    throw UsageError("cannot open waypoint file: " + waypoints_path);
                }
                walk = parse_waypoints(in);
            } else {
                const int toward = heading.value_or(which == ScenarioKind::SameNetwork ? 1 : 2);
                walk = default_waypoints(which, in_call, speed, toward);
            }
            OverlapOptions options;
            options.rule.kind =
                rule_text == "lexicographic" ? CombineRule::Kind::Lexicographic : CombineRule::Kind::Ratio;
            const ScenarioRun run = run_scenario(which, env, MobileTerminal(ptn, 1), walk, options);
            std::ostringstream text;
            write_trace(text, scenario_trace(run));
            emit(text.str(), output_path, out);
        } else if (*report) {
            const ReportValues r = report_values(p);
            emit(report_csv ? csv_text(report_table(r)) : format_report(r), output_path, out);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitModel;
    }
    return kExitOk;
}

}  // namespace locdb
