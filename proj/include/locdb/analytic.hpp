#pragma once

#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "locdb/index/service_time.hpp"
#include "locdb/params.hpp"

namespace locdb {

/// First two moments of the service time and the arrival rate of one M/G/1
/// database queue. Seconds and events/second.
struct QueueStats {
    double mean_service = 0.0;
    double var_service = 0.0;
    double arrival_rate = 0.0;

    double utilization() const noexcept { return arrival_rate * mean_service; }
};

/// Mean response time of DB0, DB1, DB2.
struct LevelDelays {
    double T0 = 0.0;
    double T1 = 0.0;
    double T2 = 0.0;
};

enum class IndexChoice { MemoryDirect, TTreeIndex, DiskDirect };

std::string_view to_string(IndexChoice c);
/// Accepts "memory-direct", "ttree", "disk-direct". Throws ConfigError.
IndexChoice parse_index_choice(std::string_view text);

/// Pollaczek-Khinchine mean response time. Throws SaturationError when
/// lambda * E[S] >= 1.
double pk_response_time(const QueueStats& q);

/// End-to-end location update delay.
double update_delay(const LevelDelays& d, double q0, double q1);

/// End-to-end call delivery delay.
double delivery_delay(const LevelDelays& d, double p0, double p1, double p2);

/// Service time that is `low` with probability 1 - p_high and `high` with
/// probability p_high. Direct-file databases serve a request with either one
/// access (index only) or two (index plus data file).
struct TwoPointService {
    double low = 0.0;
    double high = 0.0;
    double p_high = 0.0;

    double mean() const noexcept { return low + p_high * (high - low); }
    double variance() const noexcept {
        const double spread = high - low;
        return p_high * (1.0 - p_high) * spread * spread;
    }

    template <class Rng>
    double sample(Rng& rng) const {
        if (p_high <= 0.0) {
            return low;
        }
        std::bernoulli_distribution two_access(p_high);
        return two_access(rng) ? high : low;
    }
};

/// Service law of a direct file at `level` whose unit access time is
/// `access_time` (Ts in memory, Tb on disk). Mean and variance match the
/// closed forms of the QueueStats builders below exactly in distribution.
TwoPointService direct_service_law(const SystemParams& p, const WorkloadRates& w, int level,
                                   double access_time);

QueueStats service_db0_memdirect(const SystemParams& p, const WorkloadRates& w);
QueueStats service_db1_memdirect(const SystemParams& p, const WorkloadRates& w);
QueueStats service_db2_memdirect(const SystemParams& p, const WorkloadRates& w);

/// Same formulas as the memory-resident builders with Tb substituted for Ts.
QueueStats service_diskdirect(const SystemParams& p, const WorkloadRates& w, int level);

/// Minimum sample count accepted by service_ttree.
inline constexpr std::uint64_t kMinServiceSamples = 1000;

/// Wraps an empirical T-tree estimate. Throws InsufficientSamplesError below
/// kMinServiceSamples.
QueueStats service_ttree(const ServiceTimeEstimate& est, double level_rate);

/// Storage check for a memory-resident direct file: Nt*Ei + Ni*M <= Phi_i,
/// with M = 0 at DB1 (its index holds no service profiles).
bool storage_feasible_direct(const SystemParams& p, double residing, int level);

/// Storage check for a T-tree holding `entries` index entries:
/// entries*(3*a1 + 2*a2 + Y1*Ei)/(kappa*Y1) + Ni*M <= Phi_i, M = 0 at DB1.
bool storage_feasible_ttree(const SystemParams& p, double entries, double residing, int level);

/// Index entries a T-tree at `level` must hold: every subscriber at DB0,
/// the residing users at DB1 and DB2.
double ttree_entries(const SystemParams& p, int level);

struct SelectionInputs {
    double residing = 0.0;
    double ttree_entries = 0.0;
    ServiceTimeEstimate ttree;
};

/// Default selection inputs at the configured density.
SelectionInputs default_selection_inputs(const SystemParams& p, int level,
                                         const ServiceTimeEstimate& ttree);

/// Stats of one index choice at `level` under workload w.
QueueStats level_queue_stats(const SystemParams& p, const WorkloadRates& w, int level,
                             IndexChoice choice, const ServiceTimeEstimate* ttree);

/// Among storage-feasible, non-saturated choices, the one with the lowest
/// response time; ties prefer MemoryDirect, then TTreeIndex, then DiskDirect.
/// Throws NoFeasibleChoiceError.
IndexChoice select_index(int level, const SystemParams& p, const SelectionInputs& in);

struct CurvePoint {
    double rho = 0.0;
    int level = 0;
    IndexChoice choice = IndexChoice::MemoryDirect;
    QueueStats stats;
    std::optional<double> response;  ///< empty when saturated
    bool saturated() const noexcept { return !response.has_value(); }
};

/// Response time of one database level as user density sweeps. `ttree` is
/// required for TTreeIndex. Throws ConfigError on an empty sweep.
std::vector<CurvePoint> response_curves(const SystemParams& p, std::span<const double> rho_sweep,
                                        IndexChoice choice, int level,
                                        const ServiceTimeEstimate* ttree = nullptr);

}  // namespace locdb
