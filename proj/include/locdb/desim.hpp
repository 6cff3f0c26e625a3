#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "locdb/analytic.hpp"
#include "locdb/index/access_stats.hpp"
#include "locdb/params.hpp"
#include "locdb/trace.hpp"

namespace locdb {

// ---------------------------------------------------------------------------
// Topology

/// One distributed subsystem: a DB0 over n0/n1 DB1s, each over n1 DB2s.
/// DB2 j belongs to DB1 j / n1.
class Hierarchy {
public:
    Hierarchy(int n0, int n1);

    int db1_count() const noexcept { return n0_ / n1_; }
    int db2_count() const noexcept { return n0_; }
    int db2_per_db1() const noexcept { return n1_; }
    int nodes_at(int level) const;
    int parent_db1(int db2) const;
    /// Flat index over all nodes: DB0, then DB1s, then DB2s.
    int flat_index(int level, int node) const;
    int total_nodes() const noexcept { return 1 + db1_count() + db2_count(); }

private:
    int n0_;
    int n1_;
};

/// Throws TopologyError unless n0 >= n1 >= 1 and n1 divides n0.
Hierarchy build_topology(const SystemParams& p);

// ---------------------------------------------------------------------------
// Event classes and their access paths

enum class UpdateClass { SameDb1Move, NewDb1SameDb0, NewDb0 };
enum class CallClass { SameDb2, SameDb1DiffDb2, SameDb0DiffDb1, DiffDb0 };

/// Indexed by UpdateClass: 1 - q0 - q1, q1, q0.
std::array<double, 3> update_class_probabilities(const SystemParams& p);
/// Indexed by CallClass: 1 - p0 - p1 - p2, p2, p1, p0.
std::array<double, 4> call_class_probabilities(const SystemParams& p);

/// Inverse-CDF draw from a uniform in [0, 1).
UpdateClass update_class_from_uniform(const SystemParams& p, double u);
CallClass call_class_from_uniform(const SystemParams& p, double u);

/// Database levels touched, in order. Node ids are left at 0.
///   SameDb1Move    DB2 DB2 DB1
///   NewDb1SameDb0  DB2 DB2 DB1 DB0 DB1
///   NewDb0         DB2 DB2 DB1 DB0 DB0 DB1   (old DB0 before new DB0)
FlowTrace access_path_for_update(UpdateClass c);

///   SameDb2         DB2
///   SameDb1DiffDb2  DB2 DB1 DB2
///   SameDb0DiffDb1  DB2 DB1 DB0 DB1 DB2
///   DiffDb0         DB2 DB1 DB0 DB0 DB1 DB2
FlowTrace access_path_for_call(CallClass c);

// ---------------------------------------------------------------------------
// Simulation

/// Draws one database service time.
struct ServiceSampler {
    TwoPointService two_point;
    std::vector<double> empirical;  ///< when non-empty, resampled uniformly

    double mean() const;

    template <class Rng>
    double sample(Rng& rng) const {
        if (empirical.empty()) {
            return two_point.sample(rng);
        }
        std::uniform_int_distribution<std::size_t> pick(0, empirical.size() - 1);
        return empirical[pick(rng)];
    }
};

struct SimConfig {
    double horizon_s = 500.0;
    std::uint64_t seed = 1;
    std::array<IndexChoice, 3> choices{IndexChoice::MemoryDirect, IndexChoice::MemoryDirect,
                                       IndexChoice::MemoryDirect};
    /// Per-probe T-tree costs (seconds) for levels using TTreeIndex.
    std::array<std::vector<double>, 3> ttree_costs;
    /// Run even when some level is analytically saturated.
    bool allow_saturation = false;
    /// Optional per-event trace dump (arrive/start/finish lines).
    std::ostream* trace = nullptr;
};

struct LevelSimMetrics {
    std::uint64_t arrivals = 0;         ///< accesses arriving after warm-up
    std::uint64_t completed = 0;        ///< of those, finished before the horizon
    double mean_response = 0.0;         ///< seconds
    double var_response = 0.0;
    double ci_halfwidth = 0.0;          ///< 99% batch-means half-width
    double rate_per_node = 0.0;         ///< observed arrivals / node / second
    double rate_ci_halfwidth = 0.0;     ///< 99% Poisson half-width

    friend bool operator==(const LevelSimMetrics&, const LevelSimMetrics&) = default;
};

struct SimMetrics {
    std::array<LevelSimMetrics, 3> levels;
    double T_u = 0.0;
    double T_u_ci_halfwidth = 0.0;
    double T_d = 0.0;
    double T_d_ci_halfwidth = 0.0;
    std::uint64_t updates_measured = 0;
    std::uint64_t calls_measured = 0;

    std::uint64_t events_generated = 0;  ///< update + call arrivals, whole run
    std::uint64_t accesses_enqueued = 0;
    std::uint64_t accesses_completed = 0;
    std::uint64_t accesses_in_flight = 0;
    double warmup_end = 0.0;
    double horizon = 0.0;
    bool saturated = false;

    friend bool operator==(const SimMetrics&, const SimMetrics&) = default;
};

/// Events discarded before measurements start, if the time rule ends sooner.
inline constexpr std::uint64_t kWarmupEvents = 10000;
/// Fraction of the horizon always discarded.
inline constexpr double kWarmupFraction = 0.1;
inline constexpr int kBatches = 30;

/// Service samplers per level implied by the configuration.
std::array<ServiceSampler, 3> service_samplers(const SystemParams& p, const SimConfig& cfg);

/// Discrete-event simulation of one subsystem. Updates and calls arrive as
/// Poisson streams at every DB2, are split into classes, and walk their
/// access path through FCFS single-server database queues one access at a
/// time. Accesses that would land in a neighbouring subsystem are mirrored
/// into this one, which preserves the per-instance rates by symmetry.
///
/// Deterministic for a given (params, config). Throws SaturationError when a
/// level is analytically saturated and allow_saturation is false, and
/// SimulationError when the warm-up would consume the whole horizon.
SimMetrics run_simulation(const SystemParams& p, const SimConfig& cfg);

// ---------------------------------------------------------------------------
// Two-level GSM / IS-41 baseline

class GsmRegistry {
public:
    void register_mt(Ptn ptn, int serving_vlr);
    const int* serving_vlr(Ptn ptn) const;

private:
    std::map<Ptn, int> serving_;
};

/// Call delivery through the HLR: calling MSC, HLR query, route request to
/// the serving MSC/VLR, TLDN allocation, TLDN relayed by the HLR. Throws
/// UnknownPtnError for an unregistered callee.
FlowTrace gsm_baseline_flow(const GsmRegistry& registry, int calling_msc, Ptn callee);

}  // namespace locdb
