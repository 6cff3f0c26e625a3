#include "locdb/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "locdb/error.hpp"

namespace locdb {

std::string format_full(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format_sig(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.emplace_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

namespace {

void write_row(std::ostream& out, const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) {
            out << ',';
        }
        out << row[i];
    }
    out << '\n';
}

}  // namespace

void write_csv(std::ostream& out, const CsvTable& table) {
    write_row(out, table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) {
            throw ConfigError("csv row has " + std::to_string(row.size()) + " fields, header has " +
                              std::to_string(table.header.size()));
        }
        write_row(out, row);
    }
}

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) {
        return t;
    }
    t.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (!line.empty()) {
            t.rows.push_back(split_csv_line(line));
        }
    }
    return t;
}

namespace {

double parse_number(std::string_view s, std::string_view what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ConfigError("bad " + std::string(what) + " in sweep: '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

Sweep parse_sweep(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("sweep must look like name=start:stop:step");
    }
    Sweep s;
    s.name = std::string(text.substr(0, eq));
    const auto rest = text.substr(eq + 1);
    const auto c1 = rest.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : rest.find(':', c1 + 1);
    if (c2 == std::string_view::npos || rest.find(':', c2 + 1) != std::string_view::npos) {
        throw ConfigError("sweep must look like name=start:stop:step");
    }
    s.start = parse_number(rest.substr(0, c1), "start");
    s.stop = parse_number(rest.substr(c1 + 1, c2 - c1 - 1), "stop");
    s.step = parse_number(rest.substr(c2 + 1), "step");
    if (!(s.step > 0.0)) {
        throw ConfigError("sweep step must be positive");
    }
    if (s.stop < s.start) {
        throw ConfigError("sweep stop is below start");
    }
    return s;
}

std::vector<double> Sweep::values() const {
    // Tolerate the rounding of (stop - start) / step so the endpoint is kept.
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    std::vector<double> out;
    out.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        out.push_back(start + static_cast<double>(i) * step);
    }
    return out;
}

}  // namespace locdb
