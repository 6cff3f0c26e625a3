#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <list>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "locdb/index/access_stats.hpp"
#include "locdb/trace.hpp"

namespace locdb {

using NetworkId = int;
using VlrId = int;
using RegionId = int;

// ---------------------------------------------------------------------------
// Environment

struct Network {
    NetworkId id = 0;
    std::string operator_name;
    bool home = false;
};

struct VlrInfo {
    VlrId id = 0;
    NetworkId network = 0;
    int db1 = 0;  ///< DB1 the VLR (DB2) reports to
    std::set<RegionId> regions;
    double bandwidth_mbps = 0.0;
    int signal_class = 0;
};

/// Networks, their VLR coverage (abstract region ids) and an explicit
/// region-overlap relation. A VLR covers region r when it owns r or owns a
/// region declared to overlap r. VLRs of different networks owning the same
/// region id overlap there.
class NetworkEnv {
public:
    void add_network(Network n);
    /// Throws ProtocolError for an unknown network, a duplicate VLR id, a
    /// region already owned by a VLR of the same network, or negative bandwidth.
    void add_vlr(VlrInfo v);
    void add_overlap(RegionId a, RegionId b);

    const Network& network(NetworkId id) const;
    const VlrInfo& vlr(VlrId id) const;
    bool has_vlr(VlrId id) const { return vlrs_.contains(id); }
    const std::map<NetworkId, Network>& networks() const { return networks_; }
    const std::map<VlrId, VlrInfo>& vlrs() const { return vlrs_; }

    bool regions_overlap(RegionId a, RegionId b) const;
    bool covers(VlrId v, RegionId r) const;
    bool vlrs_overlap(VlrId a, VlrId b) const;
    /// VLRs covering region r, ascending id.
    std::vector<VlrId> covering(RegionId r) const;

private:
    std::map<NetworkId, Network> networks_;
    std::map<VlrId, VlrInfo> vlrs_;
    std::set<std::pair<RegionId, RegionId>> overlaps_;
};

// ---------------------------------------------------------------------------
// Mobile terminal

class MobileTerminal {
public:
    MobileTerminal(Ptn ptn, NetworkId home) : ptn_(ptn), home_(home) {}

    Ptn ptn() const noexcept { return ptn_; }
    NetworkId home_network() const noexcept { return home_; }

    RegionId region = 0;
    /// Signed speed toward each candidate network (km/hr); negative recedes.
    std::map<NetworkId, double> approach_kmh;
    double bandwidth_required_mbps = 1.0;
    bool in_call = false;

    double approach_toward(NetworkId n) const;

private:
    Ptn ptn_;
    NetworkId home_;
};

// ---------------------------------------------------------------------------
// Neighbor location register

enum class NeighborLink { SameNetwork, Interworking };

struct NeighborEntry {
    NetworkId network = 0;
    VlrId vlr = 0;
    int signal_class = 0;
    NeighborLink link = NeighborLink::SameNetwork;
};

struct NeighborRegister {
    VlrId owner = 0;
    std::vector<NeighborEntry> neighbors;  ///< ascending VLR id
    std::vector<Ptn> overlap_zone_mts;

    bool lists(VlrId v) const;
};

/// Every VLR overlapping `vlr`'s coverage, plus the terminals standing in a
/// region covered both by `vlr` and by one of those neighbors. Throws
/// ProtocolError for an unknown VLR.
NeighborRegister neighbor_scan(VlrId vlr, const NetworkEnv& env,
                               std::span<const MobileTerminal> terminals = {});

struct CacheEntry {
    Ptn ptn = 0;
    VlrId vlr = 0;
    NetworkId network = 0;
    NeighborLink link = NeighborLink::SameNetwork;
    std::uint64_t last_touch = 0;
};

/// Recently registered, called or calling terminals. Least recently touched
/// entry is evicted at capacity; at most one entry per PTN.
class NlrCache {
public:
    static constexpr std::size_t kDefaultCapacity = 64;

    explicit NlrCache(std::size_t capacity = kDefaultCapacity);

    /// A hit refreshes the entry's touch time.
    std::optional<CacheEntry> lookup(Ptn ptn);
    void insert(CacheEntry entry);
    void erase(Ptn ptn);

    std::size_t size() const noexcept { return index_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    bool contains(Ptn ptn) const { return index_.contains(ptn); }

private:
    std::size_t capacity_;
    std::uint64_t clock_ = 0;
    std::list<CacheEntry> order_;  ///< front = most recent
    std::unordered_map<Ptn, std::list<CacheEntry>::iterator> index_;
};

// ---------------------------------------------------------------------------
// Update condition

/// Bandwidth pressure: required / available. Throws NoCapacityError when
/// nothing is available.
double compute_qos(double required_mbps, double available_mbps);

/// Signed approach speed toward `candidate` over the reference speed,
/// forced positive for the terminal's own network.
double compute_velocity_sign(const MobileTerminal& mt, NetworkId candidate, double reference_kmh);

struct CombineRule {
    enum class Kind { Ratio, Lexicographic };
    Kind kind = Kind::Ratio;
    double epsilon = 1e-3;
};

struct UpdateCondition {
    double q = 0.0;
    double vs = 0.0;
    double c = 0.0;
};

/// Ratio rule: C = |q| / max(|Vs|, epsilon). Lexicographic rule: C = |q| with
/// ties on the larger |Vs| resolved in choose_network.
UpdateCondition update_condition(double q, double vs, const CombineRule& rule = {});

struct Candidate {
    NetworkId network = 0;
    VlrId vlr = 0;
    bool own = false;
    UpdateCondition condition;
};

/// Lowest C; ties go to the own network, then the lowest network id, then
/// the lowest VLR id. Throws ProtocolError on an empty list.
Candidate choose_network(std::span<const Candidate> candidates, const CombineRule& rule = {});

// ---------------------------------------------------------------------------
// Location management for overlapping coverage

struct Registration {
    NetworkId network = 0;
    VlrId vlr = 0;
    friend bool operator==(const Registration&, const Registration&) = default;
};

/// One NLR-to-NLR address pointer held for an in-call terminal.
struct AddressPointer {
    VlrId from = 0;
    VlrId to = 0;
    friend bool operator==(const AddressPointer&, const AddressPointer&) = default;
};

using PointerChain = std::vector<AddressPointer>;

struct PointerOp {
    enum class Kind { Create, Remove };
    Kind kind = Kind::Create;
    AddressPointer pointer;
};

struct HandoffResult {
    FlowTrace trace;
    std::vector<PointerOp> pointer_ops;
};

struct OverlapOptions {
    std::size_t cache_capacity = NlrCache::kDefaultCapacity;
    double reference_speed_kmh = 56.0;
    CombineRule rule;
};

/// State machine for terminals moving across overlapping coverage: NLR per
/// VLR (neighbors, overlap-zone terminals, cache), registrations and
/// in-call address pointers. Single logical thread of control.
class OverlapSystem {
public:
    explicit OverlapSystem(NetworkEnv env, OverlapOptions options = {});

    const NetworkEnv& env() const noexcept { return env_; }
    const OverlapOptions& options() const noexcept { return options_; }
    const NeighborRegister& nlr(VlrId v) const;
    NlrCache& cache(VlrId v);

    std::optional<Registration> registration(Ptn ptn) const;
    const PointerChain& pointer_chain(Ptn ptn) const;
    std::size_t registration_count(Ptn ptn) const;

    /// Initial registration of an unregistered terminal.
    FlowTrace attach(const MobileTerminal& mt, VlrId vlr);

    /// The terminal stands where `current` overlaps the candidates: NLR
    /// stores it as an overlap-zone terminal and, if it is in a call and
    /// moving toward another network, one address pointer per candidate VLR.
    HandoffResult enter_overlap(const MobileTerminal& mt, std::span<const VlrId> candidates);

    /// Moves the registration from `from` to `to`. In-call terminals keep
    /// an address pointer across the detach. Register goes to DB1, and on
    /// to DB0 when the networks differ; the old VLR entry is deleted and
    /// every pointer removed. Throws ProtocolError if the terminal is not
    /// registered at `from` or `to` is not an NLR neighbor of `from`.
    HandoffResult handoff(const MobileTerminal& mt, VlrId from, VlrId to);

    /// Drops every pointer of the terminal (call ended or handoff aborted).
    HandoffResult clear_pointers(const MobileTerminal& mt);

    /// Call delivery from `caller_vlr`: NLR cache first, then DB1/DB0.
    /// Throws UnknownPtnError for an unregistered callee.
    FlowTrace deliver_call(VlrId caller_vlr, Ptn callee);

    /// Candidate scoring for every VLR in `vlrs`.
    std::vector<Candidate> score(const MobileTerminal& mt, std::span<const VlrId> vlrs) const;

private:
    struct NlrState {
        NeighborRegister reg;
        NlrCache cache;
    };

    NlrState& state(VlrId v);
    void publish(const MobileTerminal& mt, VlrId vlr);

    NetworkEnv env_;
    OverlapOptions options_;
    std::map<VlrId, NlrState> nlrs_;
    std::map<Ptn, Registration> registrations_;
    std::map<Ptn, PointerChain> chains_;
};

// ---------------------------------------------------------------------------
// Scenarios

enum class ScenarioKind { SameNetwork, TwoNetworks, SeveralNetworks };

/// `t_s,region_id,speed_kmh,heading_network_id,in_call`
struct Waypoint {
    double t_s = 0.0;
    RegionId region = 0;
    double speed_kmh = 0.0;
    NetworkId heading = 0;
    bool in_call = false;
};

std::vector<Waypoint> parse_waypoints(std::istream& in);
std::string format_waypoint(const Waypoint& w);
ScenarioKind parse_scenario_kind(std::string_view text);

/// Coverage layouts of the three overlap situations. The terminal's own
/// network is X (id 1); Y is 2 and Z is 3.
///   a: VLR1 {10,20} and VLR2 {21,30} of X, regions 20 and 21 overlap
///   b: VLR1 {10,20} of X, VLR2 {20,30} of Y
///   c: VLR1 {10,20} of X, VLR2 {20,30,31} of Y, VLR3 {20,40,41} of Z
NetworkEnv make_scenario_env(ScenarioKind which);

/// A -> B -> C walk (A -> B -> C -> D for c) heading for network `heading`.
std::vector<Waypoint> default_waypoints(ScenarioKind which, bool in_call, double speed_kmh,
                                        NetworkId heading);

struct ScenarioSnapshot {
    std::size_t waypoint = 0;
    std::optional<Registration> registration;
    std::size_t registrations = 0;
    std::size_t pointers = 0;
    bool quiescent = false;
    Ptn ptn = 0;
};

struct ScenarioRun {
    FlowTrace trace;
    std::vector<ScenarioSnapshot> snapshots;
    std::vector<FlowTrace> call_traces;  ///< probe calls after each waypoint
    std::size_t max_pointers = 0;
    std::size_t pointers_created = 0;
    std::size_t pointers_removed = 0;
    std::optional<Registration> final_registration;
};

/// Drives `mt` through the waypoints. After each waypoint every other VLR
/// places a probe call to the terminal. Throws ProtocolError for a
/// malformed waypoint list (too few points for the scenario, decreasing
/// times, or a region nobody covers).
ScenarioRun run_scenario(ScenarioKind which, const NetworkEnv& env, MobileTerminal mt,
                         std::span<const Waypoint> waypoints, const OverlapOptions& options = {});

}  // namespace locdb
