#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

namespace locdb {

/// Every model constant of the location-database performance model.
///
/// Defaults are the reference scenario: mobility and traffic (n0 .. rho)
/// and index costs (Nt, Y1, kappa, Tc, c1..c3, Ts, Tb). Ei, M, a1, a2, Y2,
/// c4 and the capacities Phi0..Phi2 are plausible magnitudes only.
///
/// Times are stored in seconds regardless of the unit used in the config
/// file (Ts_us, Tb_ms, Tc_us).
struct SystemParams {
    int n0 = 128;  ///< DB2s per DB0
    int n1 = 16;   ///< DB2s per DB1

    double r1 = 0.4;       ///< fraction of users at speed v1
    double r2 = 0.1;       ///< fraction of users at speed v2
    double v1_kmh = 5.6;
    double v2_kmh = 56.0;
    double L_km = 30.3;    ///< RA boundary length
    double A_km2 = 57.4;   ///< RA area
    double xi_per_hr = 1.4;
    double rho = 415.0;    ///< users per km^2

    double q0 = 0.05;  ///< move enters a different DB0 area
    double q1 = 0.15;  ///< move enters a new DB1 area, same DB0
    double p0 = 0.01;  ///< caller/callee in different DB0 areas
    double p1 = 0.04;  ///< same DB0, different DB1
    double p2 = 0.45;  ///< same DB1, different DB2

    double Nt = 1e9;
    int Y1 = 15;
    int Y2 = 8;  ///< ceil(Y1 / 2)
    double kappa = 0.95;

    double Ts = 10e-6;  ///< memory access time [s]
    double Tb = 20e-3;  ///< disk block access time [s]
    double Tc = 1e-6;   ///< unit traversal/comparison time [s]

    double c1 = 10.0;
    double c2 = 100.0;
    double c3 = 20.0;
    double c4 = 1.0;

    double Ei_bytes = 8.0;
    double M_bytes = 512.0;
    double a1_bytes = 8.0;
    double a2_bytes = 8.0;
    double Phi0_bytes = 1099511627776.0;  // 2^40
    double Phi1_bytes = 1099511627776.0;
    double Phi2_bytes = 1099511627776.0;

    /// Storage capacity of the given database level (0, 1 or 2).
    double phi(int level) const;

    /// Throws ConfigError naming the first offending key.
    void validate() const;

    friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// Per-RA workload.
struct WorkloadRates {
    double lambda_u = 0.0;  ///< location updates per second
    double lambda_c = 0.0;  ///< call originations per second
};

/// Arrival rate at one database instance of each level.
struct LevelRates {
    double lambda0 = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;

    double at(int level) const;
};

SystemParams parse_config(std::istream& in);
SystemParams load_config(const std::filesystem::path& path);

/// Writes every key in config syntax; parse_config(to_config_string(p)) == p.
std::string to_config_string(const SystemParams& p);

/// Location updates per RA per second from the two-speed-class fluid model.
double location_update_rate(const SystemParams& p);

/// Calls originating from one RA per second.
double call_origination_rate(const SystemParams& p);

WorkloadRates workload_rates(const SystemParams& p);

/// Per-instance arrival rates at DB0, DB1 and DB2.
LevelRates arrival_rates(const SystemParams& p, const WorkloadRates& w);

/// Users residing in the area of one DB_level instance (rho * A per RA).
double residing_users(const SystemParams& p, int level);

}  // namespace locdb
