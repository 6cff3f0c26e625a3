#include "locdb/params.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string_view>
#include <vector>

#include "locdb/error.hpp"

namespace locdb {
namespace {

enum class FieldKind { Real, Integer };

// decimal_shift: the config value equals the stored value times 10^decimal_shift.
struct KeySpec {
    std::string_view key;
    FieldKind kind;
    int decimal_shift;
    double SystemParams::*real;
    int SystemParams::*integer;
};

constexpr KeySpec real_key(std::string_view key, double SystemParams::*m, int shift = 0) {
    return {key, FieldKind::Real, shift, m, nullptr};
}

constexpr KeySpec int_key(std::string_view key, int SystemParams::*m) {
    return {key, FieldKind::Integer, 0, nullptr, m};
}

const std::vector<KeySpec>& key_table() {
    static const std::vector<KeySpec> table = {
        int_key("n0", &SystemParams::n0),
        int_key("n1", &SystemParams::n1),
        real_key("r1", &SystemParams::r1),
        real_key("r2", &SystemParams::r2),
        real_key("v1_kmh", &SystemParams::v1_kmh),
        real_key("v2_kmh", &SystemParams::v2_kmh),
        real_key("L_km", &SystemParams::L_km),
        real_key("A_km2", &SystemParams::A_km2),
        real_key("xi_per_hr", &SystemParams::xi_per_hr),
        real_key("rho_users_per_km2", &SystemParams::rho),
        real_key("q0", &SystemParams::q0),
        real_key("q1", &SystemParams::q1),
        real_key("p0", &SystemParams::p0),
        real_key("p1", &SystemParams::p1),
        real_key("p2", &SystemParams::p2),
        real_key("Nt", &SystemParams::Nt),
        int_key("Y1", &SystemParams::Y1),
        int_key("Y2", &SystemParams::Y2),
        real_key("kappa", &SystemParams::kappa),
        real_key("Ts_us", &SystemParams::Ts, 6),
        real_key("Tb_ms", &SystemParams::Tb, 3),
        real_key("Tc_us", &SystemParams::Tc, 6),
        real_key("c1", &SystemParams::c1),
        real_key("c2", &SystemParams::c2),
        real_key("c3", &SystemParams::c3),
        real_key("c4", &SystemParams::c4),
        real_key("Ei_bytes", &SystemParams::Ei_bytes),
        real_key("M_bytes", &SystemParams::M_bytes),
        real_key("a1_bytes", &SystemParams::a1_bytes),
        real_key("a2_bytes", &SystemParams::a2_bytes),
        real_key("Phi0_bytes", &SystemParams::Phi0_bytes),
        real_key("Phi1_bytes", &SystemParams::Phi1_bytes),
        real_key("Phi2_bytes", &SystemParams::Phi2_bytes),
    };
    return table;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

// Parses a decimal literal and scales it by 10^-shift exactly, by moving the
// exponent in the text rather than multiplying in binary.
double parse_scaled(std::string_view text, int shift, std::string_view key) {
    std::string literal(text);
    if (shift != 0) {
        const auto e = literal.find_first_of("eE");
        long exponent = 0;
        std::string mantissa = literal;
        if (e != std::string::npos) {
            mantissa = literal.substr(0, e);
            const std::string exp_text = literal.substr(e + 1);
            const char* first = exp_text.data();
            const char* last = exp_text.data() + exp_text.size();
            if (!exp_text.empty() && exp_text.front() == '+') {
                ++first;
            }
            const auto [ptr, ec] = std::from_chars(first, last, exponent);
            if (ec != std::errc{} || ptr != last) {
                throw ConfigError("cannot parse value for " + std::string(key) + ": '" +
                                  std::string(text) + "'");
            }
        }
        literal = mantissa + "e" + std::to_string(exponent - shift);
    }
    double value = 0.0;
    const char* first = literal.data();
    const char* last = literal.data() + literal.size();
    if (first != last && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || text.empty()) {
        throw ConfigError("cannot parse value for " + std::string(key) + ": '" +
                          std::string(text) + "'");
    }
    return value;
}

// Shortest round-trip text of value * 10^shift.
std::string format_scaled(double value, int shift) {
    if (value == 0.0) {
        return "0";
    }
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific);
    std::string sci(buf, ptr);
    const auto e = sci.find('e');
    const std::string mantissa = sci.substr(0, e);
    const int exponent = std::stoi(sci.substr(e + 1)) + shift;

    std::string digits;
    for (char ch : mantissa) {
        if (ch != '.' && ch != '-') {
            digits.push_back(ch);
        }
    }
    const bool negative = value < 0.0;
    // Decimal point sits after digits[0] at 10^exponent.
    const int point = exponent + 1;
    std::string out = negative ? "-" : "";
    if (exponent < -6 || exponent > 20) {
        out += digits.substr(0, 1);
        if (digits.size() > 1) {
            out += "." + digits.substr(1);
        }
        out += "e" + std::to_string(exponent);
    } else if (point <= 0) {
        out += "0." + std::string(static_cast<std::size_t>(-point), '0') + digits;
    } else if (static_cast<std::size_t>(point) >= digits.size()) {
        out += digits + std::string(static_cast<std::size_t>(point) - digits.size(), '0');
    } else {
        out += digits.substr(0, point) + "." + digits.substr(point);
    }
    return out;
}

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw ConfigError(message);
    }
}

void require_probability(double v, const char* key) {
    require(v >= 0.0 && v <= 1.0, std::string(key) + " out of [0,1]");
}

constexpr double kSumSlack = 1e-12;

}  // namespace

double SystemParams::phi(int level) const {
    switch (level) {
        case 0: return Phi0_bytes;
        case 1: return Phi1_bytes;
        case 2: return Phi2_bytes;
        default: throw ConfigError("database level must be 0, 1 or 2");
    }
}

void SystemParams::validate() const {
    require_probability(r1, "r1");
    require_probability(r2, "r2");
    require_probability(q0, "q0");
    require_probability(q1, "q1");
    require_probability(p0, "p0");
    require_probability(p1, "p1");
    require_probability(p2, "p2");
    require(r1 + r2 <= 1.0 + kSumSlack, "r1 + r2 exceeds 1");
    require(q0 + q1 <= 1.0 + kSumSlack, "q0 + q1 exceeds 1");
    require(p0 + p1 + p2 <= 1.0 + kSumSlack, "p0 + p1 + p2 exceeds 1");

    require(n1 >= 1, "n1 must be >= 1");
    require(n0 >= n1, "n0 must be >= n1");
    require(n0 % n1 == 0, "n0 must be a multiple of n1");

    require(v1_kmh >= 0.0, "v1_kmh must be non-negative");
    require(v2_kmh >= 0.0, "v2_kmh must be non-negative");
    require(xi_per_hr >= 0.0, "xi_per_hr must be non-negative");
    require(L_km > 0.0, "L_km must be positive");
    require(A_km2 > 0.0, "A_km2 must be positive");
    require(rho > 0.0, "rho_users_per_km2 must be positive");
    require(Nt > 0.0, "Nt must be positive");

    require(Y1 >= 1, "Y1 must be >= 1");
    require(Y2 >= 1 && Y2 <= Y1, "Y2 out of [1,Y1]");
    require(kappa > 0.0 && kappa <= 1.0, "kappa out of (0,1]");

    require(Ts > 0.0, "Ts_us must be positive");
    require(Tb > 0.0, "Tb_ms must be positive");
    require(Tc > 0.0, "Tc_us must be positive");
    require(c1 >= 0.0, "c1 must be non-negative");
    require(c2 >= 0.0, "c2 must be non-negative");
    require(c3 >= 0.0, "c3 must be non-negative");
    require(c4 >= 0.0, "c4 must be non-negative");

    require(Ei_bytes >= 0.0, "Ei_bytes must be non-negative");
    require(M_bytes >= 0.0, "M_bytes must be non-negative");
    require(a1_bytes >= 0.0, "a1_bytes must be non-negative");
    require(a2_bytes >= 0.0, "a2_bytes must be non-negative");
    require(Phi0_bytes >= 0.0, "Phi0_bytes must be non-negative");
    require(Phi1_bytes >= 0.0, "Phi1_bytes must be non-negative");
    require(Phi2_bytes >= 0.0, "Phi2_bytes must be non-negative");
}

double LevelRates::at(int level) const {
    switch (level) {
        case 0: return lambda0;
        case 1: return lambda1;
        case 2: return lambda2;
        default: throw ConfigError("database level must be 0, 1 or 2");
    }
}

SystemParams parse_config(std::istream& in) {
    SystemParams p;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) {
            view = view.substr(0, hash);
        }
        view = trim(view);
        if (view.empty()) {
            continue;
        }
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const auto key = trim(view.substr(0, eq));
        const auto value = trim(view.substr(eq + 1));

        const KeySpec* spec = nullptr;
        for (const auto& k : key_table()) {
            if (k.key == key) {
                spec = &k;
                break;
            }
        }
        if (spec == nullptr) {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" +
                              std::string(key) + "'");
        }

        const double parsed = parse_scaled(value, spec->decimal_shift, key);
        if (spec->kind == FieldKind::Integer) {
            if (parsed != std::floor(parsed) || std::abs(parsed) > 1e9) {
                throw ConfigError(std::string(key) + " must be an integer");
            }
            p.*(spec->integer) = static_cast<int>(parsed);
        } else {
            if (!std::isfinite(parsed)) {
                throw ConfigError(std::string(key) + " must be finite");
            }
            p.*(spec->real) = parsed;
        }
    }
    p.validate();
    return p;
}

SystemParams load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path.string());
    }
    return parse_config(in);
}

std::string to_config_string(const SystemParams& p) {
    std::ostringstream out;
    for (const auto& k : key_table()) {
        out << k.key << " = ";
        if (k.kind == FieldKind::Integer) {
            out << p.*(k.integer);
        } else {
            out << format_scaled(p.*(k.real), k.decimal_shift);
        }
        out << '\n';
    }
    return out.str();
}

double location_update_rate(const SystemParams& p) {
    return p.rho * p.L_km * (p.v1_kmh * p.r1 + p.v2_kmh * p.r2) / (3600.0 * std::numbers::pi);
}

double call_origination_rate(const SystemParams& p) {
    return p.rho * p.xi_per_hr * p.A_km2 / 3600.0;
}

WorkloadRates workload_rates(const SystemParams& p) {
    return {location_update_rate(p), call_origination_rate(p)};
}

LevelRates arrival_rates(const SystemParams& p, const WorkloadRates& w) {
    const double lu = w.lambda_u;
    const double lc = w.lambda_c;
    LevelRates r;
    r.lambda0 = p.n0 * ((2.0 * p.q0 + p.q1) * lu + (2.0 * p.p0 + p.p1) * lc);
    r.lambda1 = p.n1 * ((1.0 + p.q0 + p.q1) * lu + (2.0 * p.p0 + 2.0 * p.p1 + p.p2) * lc);
    r.lambda2 = 2.0 * lu + (1.0 + p.p0 + p.p1 + p.p2) * lc;
    return r;
}

double residing_users(const SystemParams& p, int level) {
    const double per_ra = p.rho * p.A_km2;
    switch (level) {
        case 0: return per_ra * p.n0;
        case 1: return per_ra * p.n1;
        case 2: return per_ra;
        default: throw ConfigError("database level must be 0, 1 or 2");
    }
}

}  // namespace locdb
