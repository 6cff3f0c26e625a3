#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace locdb {

inline constexpr std::string_view kSaturated = "SATURATED";

inline constexpr std::string_view kAnalyzeHeader = "rho,level,index,lambda_per_s,E_S_us,Var_S_us2,T_us";
inline constexpr std::string_view kSimulateHeader =
    "rho,level,index,lambda_per_s,E_S_us,Var_S_us2,T_us,empirical_T_us,ci_halfwidth_us,T_u_us,T_d_us";
inline constexpr std::string_view kBenchHeader = "index,keys,probes,mean_us,var_us2";

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Shortest text that parses back to exactly the same double.
std::string format_full(double v);
/// Human-readable, `digits` significant digits.
std::string format_sig(double v, int digits = 4);

std::vector<std::string> split_csv_line(std::string_view line);

/// Header then rows, comma separated, '\n' terminated. Fields are numbers,
/// identifiers or kSaturated and are never quoted. Throws ConfigError when a
/// row's width differs from the header's.
void write_csv(std::ostream& out, const CsvTable& table);
CsvTable read_csv(std::istream& in);

/// `name=start:stop:step`, endpoints inclusive.
struct Sweep {
    std::string name;
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;

    std::vector<double> values() const;
};

/// Throws ConfigError on malformed text, a non-positive step or stop < start.
Sweep parse_sweep(std::string_view text);

}  // namespace locdb
