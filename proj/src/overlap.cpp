#include "locdb/overlap.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>

#include "locdb/error.hpp"

namespace locdb {

// ---------------------------------------------------------------------------
// Environment

void NetworkEnv::add_network(Network n) {
    const NetworkId id = n.id;
    networks_[id] = std::move(n);
}

void NetworkEnv::add_vlr(VlrInfo v) {
    if (!networks_.contains(v.network)) {
        throw ProtocolError("VLR " + std::to_string(v.id) + " references unknown network " +
                            std::to_string(v.network));
    }
    if (vlrs_.contains(v.id)) {
        throw ProtocolError("duplicate VLR id " + std::to_string(v.id));
    }
    if (v.bandwidth_mbps < 0.0) {
        throw ProtocolError("VLR " + std::to_string(v.id) + " advertises negative bandwidth");
    }
    for (const auto& [id, other] : vlrs_) {
        if (other.network != v.network) {
            continue;
        }
        for (RegionId r : v.regions) {
            if (other.regions.contains(r)) {
                throw ProtocolError("region " + std::to_string(r) + " already owned by VLR " +
                                    std::to_string(id) + " of the same network");
            }
        }
    }
    const VlrId id = v.id;
    vlrs_[id] = std::move(v);
}

void NetworkEnv::add_overlap(RegionId a, RegionId b) {
    overlaps_.insert({a, b});
    overlaps_.insert({b, a});
}

const Network& NetworkEnv::network(NetworkId id) const {
    const auto it = networks_.find(id);
    if (it == networks_.end()) {
        throw ProtocolError("unknown network " + std::to_string(id));
    }
    return it->second;
}

const VlrInfo& NetworkEnv::vlr(VlrId id) const {
    const auto it = vlrs_.find(id);
    if (it == vlrs_.end()) {
        throw ProtocolError("unknown VLR " + std::to_string(id));
    }
    return it->second;
}

bool NetworkEnv::regions_overlap(RegionId a, RegionId b) const {
    return a == b || overlaps_.contains({a, b});
}

bool NetworkEnv::covers(VlrId v, RegionId r) const {
    const auto& info = vlr(v);
    if (info.regions.contains(r)) {
        return true;
    }
    return std::any_of(info.regions.begin(), info.regions.end(),
                       [&](RegionId own) { return overlaps_.contains({own, r}); });
}

bool NetworkEnv::vlrs_overlap(VlrId a, VlrId b) const {
    if (a == b) {
        return false;
    }
    const auto& info = vlr(a);
    return std::any_of(info.regions.begin(), info.regions.end(),
                       [&](RegionId r) { return covers(b, r); });
}

std::vector<VlrId> NetworkEnv::covering(RegionId r) const {
    std::vector<VlrId> out;
    for (const auto& [id, info] : vlrs_) {
        if (covers(id, r)) {
            out.push_back(id);
        }
    }
    return out;
}

double MobileTerminal::approach_toward(NetworkId n) const {
    const auto it = approach_kmh.find(n);
    return it == approach_kmh.end() ? 0.0 : it->second;
}

// ---------------------------------------------------------------------------
// Neighbor location register

bool NeighborRegister::lists(VlrId v) const {
    return std::any_of(neighbors.begin(), neighbors.end(),
                       [v](const NeighborEntry& e) { return e.vlr == v; });
}

NeighborRegister neighbor_scan(VlrId vlr, const NetworkEnv& env,
                               std::span<const MobileTerminal> terminals) {
    const auto& owner = env.vlr(vlr);
    NeighborRegister reg;
    reg.owner = vlr;
    for (const auto& [id, info] : env.vlrs()) {
        if (env.vlrs_overlap(vlr, id)) {
            reg.neighbors.push_back({info.network, id, info.signal_class,
                                     info.network == owner.network ? NeighborLink::SameNetwork
                                                                   : NeighborLink::Interworking});
        }
    }
    for (const auto& mt : terminals) {
        if (!env.covers(vlr, mt.region)) {
            continue;
        }
        const bool boundary = std::any_of(reg.neighbors.begin(), reg.neighbors.end(),
                                          [&](const NeighborEntry& e) { return env.covers(e.vlr, mt.region); });
        if (boundary) {
            reg.overlap_zone_mts.push_back(mt.ptn());
        }
    }
    return reg;
}

NlrCache::NlrCache(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) {
        throw ProtocolError("NLR cache capacity must be positive");
    }
}

std::optional<CacheEntry> NlrCache::lookup(Ptn ptn) {
    const auto it = index_.find(ptn);
    if (it == index_.end()) {
        return std::nullopt;
    }
    it->second->last_touch = ++clock_;
    order_.splice(order_.begin(), order_, it->second);
    return *it->second;
}

void NlrCache::insert(CacheEntry entry) {
    entry.last_touch = ++clock_;
    if (const auto it = index_.find(entry.ptn); it != index_.end()) {
        *it->second = entry;
        order_.splice(order_.begin(), order_, it->second);
        return;
    }
    if (index_.size() == capacity_) {
        index_.erase(order_.back().ptn);
        order_.pop_back();
    }
    order_.push_front(entry);
    index_[entry.ptn] = order_.begin();
}

void NlrCache::erase(Ptn ptn) {
    const auto it = index_.find(ptn);
    if (it != index_.end()) {
        order_.erase(it->second);
        index_.erase(it);
    }
}

// ---------------------------------------------------------------------------
// Update condition

double compute_qos(double required_mbps, double available_mbps) {
    if (!(available_mbps > 0.0)) {
        throw NoCapacityError("no bandwidth available");
    }
    return required_mbps / available_mbps;
}

double compute_velocity_sign(const MobileTerminal& mt, NetworkId candidate, double reference_kmh) {
    if (!(reference_kmh > 0.0)) {
        throw ProtocolError("reference speed must be positive");
    }
    const double vs = mt.approach_toward(candidate) / reference_kmh;
    return candidate == mt.home_network() ? std::abs(vs) : vs;
}

UpdateCondition update_condition(double q, double vs, const CombineRule& rule) {
    UpdateCondition u{q, vs, 0.0};
    if (rule.kind == CombineRule::Kind::Ratio) {
        u.c = std::abs(q) / std::max(std::abs(vs), rule.epsilon);
    } else {
        u.c = std::abs(q);
    }
    return u;
}

Candidate choose_network(std::span<const Candidate> candidates, const CombineRule& rule) {
    if (candidates.empty()) {
        throw ProtocolError("no candidate network");
    }
    const auto better = [&rule](const Candidate& a, const Candidate& b) {
        if (a.condition.c != b.condition.c) {
            return a.condition.c < b.condition.c;
        }
        if (rule.kind == CombineRule::Kind::Lexicographic) {
            const double va = std::abs(a.condition.vs);
            const double vb = std::abs(b.condition.vs);
            if (va != vb) {
                return va > vb;
            }
        }
        if (a.own != b.own) {
            return a.own;
        }
        if (a.network != b.network) {
            return a.network < b.network;
        }
        return a.vlr < b.vlr;
    };
    return *std::min_element(candidates.begin(), candidates.end(), better);
}

// ---------------------------------------------------------------------------
// OverlapSystem

namespace {

TraceStep step(Role role, int node, AccessKind kind, int peer = -1) {
    TraceStep s;
    s.role = role;
    s.node_id = node;
    s.kind = kind;
    s.peer = peer;
    return s;
}

}  // namespace

OverlapSystem::OverlapSystem(NetworkEnv env, OverlapOptions options)
    : env_(std::move(env)), options_(options) {
    for (const auto& [id, info] : env_.vlrs()) {
        nlrs_.emplace(id, NlrState{neighbor_scan(id, env_), NlrCache(options_.cache_capacity)});
    }
}

OverlapSystem::NlrState& OverlapSystem::state(VlrId v) {
    const auto it = nlrs_.find(v);
    if (it == nlrs_.end()) {
        throw ProtocolError("unknown VLR " + std::to_string(v));
    }
    return it->second;
}

const NeighborRegister& OverlapSystem::nlr(VlrId v) const {
    const auto it = nlrs_.find(v);
    if (it == nlrs_.end()) {
        throw ProtocolError("unknown VLR " + std::to_string(v));
    }
    return it->second.reg;
}

NlrCache& OverlapSystem::cache(VlrId v) { return state(v).cache; }

std::optional<Registration> OverlapSystem::registration(Ptn ptn) const {
    const auto it = registrations_.find(ptn);
    if (it == registrations_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::size_t OverlapSystem::registration_count(Ptn ptn) const {
    return registrations_.count(ptn);
}

const PointerChain& OverlapSystem::pointer_chain(Ptn ptn) const {
    static const PointerChain empty;
    const auto it = chains_.find(ptn);
    return it == chains_.end() ? empty : it->second;
}

void OverlapSystem::publish(const MobileTerminal& mt, VlrId vlr) {
    const auto& info = env_.vlr(vlr);
    auto& own = state(vlr);
    own.cache.insert({mt.ptn(), vlr, info.network, NeighborLink::SameNetwork, 0});
    for (const auto& n : own.reg.neighbors) {
        const NeighborLink link = env_.vlr(n.vlr).network == info.network ? NeighborLink::SameNetwork
                                                                          : NeighborLink::Interworking;
        state(n.vlr).cache.insert({mt.ptn(), vlr, info.network, link, 0});
    }
}

std::vector<Candidate> OverlapSystem::score(const MobileTerminal& mt, std::span<const VlrId> vlrs) const {
    std::vector<Candidate> out;
    for (VlrId v : vlrs) {
        const auto& info = env_.vlr(v);
        if (!(info.bandwidth_mbps > 0.0)) {
            continue;
        }
        const double q = compute_qos(mt.bandwidth_required_mbps, info.bandwidth_mbps);
        const double vs = compute_velocity_sign(mt, info.network, options_.reference_speed_kmh);
        out.push_back({info.network, v, info.network == mt.home_network(),
                       update_condition(q, vs, options_.rule)});
    }
    return out;
}

FlowTrace OverlapSystem::attach(const MobileTerminal& mt, VlrId vlr) {
    if (registrations_.contains(mt.ptn())) {
        throw ProtocolError("terminal " + std::to_string(mt.ptn()) + " is already registered");
    }
    const auto& info = env_.vlr(vlr);
    FlowTrace t;
    t.steps.push_back(step(Role::Vlr, vlr, AccessKind::Register));
    t.steps.push_back(step(Role::Db1, info.db1, AccessKind::Register));
    if (info.network != mt.home_network()) {
        t.steps.push_back(step(Role::Db0, info.network, AccessKind::Register));
    }
    registrations_[mt.ptn()] = {info.network, vlr};
    t.steps.push_back(step(Role::Vlr, vlr, AccessKind::Finalize));
    publish(mt, vlr);
    return t;
}

HandoffResult OverlapSystem::enter_overlap(const MobileTerminal& mt, std::span<const VlrId> candidates) {
    const auto reg = registration(mt.ptn());
    if (!reg) {
        throw ProtocolError("terminal " + std::to_string(mt.ptn()) + " is not registered");
    }
    HandoffResult r;
    auto& st = state(reg->vlr);
    auto& zone = st.reg.overlap_zone_mts;
    if (std::find(zone.begin(), zone.end(), mt.ptn()) == zone.end()) {
        zone.push_back(mt.ptn());
    }
    r.trace.steps.push_back(step(Role::Nlr, reg->vlr, AccessKind::OverlapStore));

    const bool moving_toward = std::any_of(candidates.begin(), candidates.end(), [&](VlrId v) {
        return v != reg->vlr && mt.approach_toward(env_.vlr(v).network) > 0.0;
    });
    if (!mt.in_call || !moving_toward) {
        return r;
    }
    auto& chain = chains_[mt.ptn()];
    for (VlrId v : candidates) {
        if (v == reg->vlr || !st.reg.lists(v)) {
            continue;
        }
        const AddressPointer ptr{reg->vlr, v};
        if (std::find(chain.begin(), chain.end(), ptr) != chain.end()) {
            continue;
        }
        chain.push_back(ptr);
        r.pointer_ops.push_back({PointerOp::Kind::Create, ptr});
        r.trace.steps.push_back(step(Role::Nlr, ptr.from, AccessKind::PointerCreate, ptr.to));
    }
    return r;
}

HandoffResult OverlapSystem::clear_pointers(const MobileTerminal& mt) {
    HandoffResult r;
    auto it = chains_.find(mt.ptn());
    if (it == chains_.end()) {
        return r;
    }
    for (const auto& ptr : it->second) {
        r.pointer_ops.push_back({PointerOp::Kind::Remove, ptr});
        r.trace.steps.push_back(step(Role::Nlr, ptr.from, AccessKind::PointerRemove, ptr.to));
    }
    chains_.erase(it);
    return r;
}

HandoffResult OverlapSystem::handoff(const MobileTerminal& mt, VlrId from, VlrId to) {
    const auto reg = registration(mt.ptn());
    if (!reg || reg->vlr != from) {
        throw ProtocolError("terminal " + std::to_string(mt.ptn()) + " is not registered at VLR " +
                            std::to_string(from));
    }
    if (!nlr(from).lists(to)) {
        throw ProtocolError("VLR " + std::to_string(to) + " is not a neighbor of VLR " +
                            std::to_string(from));
    }
    const auto& old_info = env_.vlr(from);
    const auto& new_info = env_.vlr(to);
    HandoffResult r;
    auto& t = r.trace.steps;

    if (mt.in_call) {
        auto& chain = chains_[mt.ptn()];
        const AddressPointer ptr{from, to};
        if (std::find(chain.begin(), chain.end(), ptr) == chain.end()) {
            chain.push_back(ptr);
            r.pointer_ops.push_back({PointerOp::Kind::Create, ptr});
            t.push_back(step(Role::Nlr, from, AccessKind::PointerCreate, to));
        }
        t.push_back(step(Role::Vlr, from, AccessKind::Detach));
        registrations_.erase(mt.ptn());
        t.push_back(step(Role::Nlr, to, AccessKind::NlrStore));
        t.push_back(step(Role::Biu, to, AccessKind::RadioSupport));
    }

    t.push_back(step(Role::Vlr, to, AccessKind::Register));
    t.push_back(step(Role::Db1, new_info.db1, AccessKind::Register));
    if (new_info.network != old_info.network) {
        t.push_back(step(Role::Db0, new_info.network, AccessKind::Register));
    }
    // old entry goes first so the finalize leaves exactly one registration
    t.push_back(step(Role::Vlr, from, AccessKind::Deregister));
    registrations_[mt.ptn()] = {new_info.network, to};
    t.push_back(step(Role::Vlr, to, AccessKind::Finalize));

    auto& zone = state(from).reg.overlap_zone_mts;
    zone.erase(std::remove(zone.begin(), zone.end(), mt.ptn()), zone.end());

    HandoffResult cleared = clear_pointers(mt);
    r.trace.append(cleared.trace);
    r.pointer_ops.insert(r.pointer_ops.end(), cleared.pointer_ops.begin(), cleared.pointer_ops.end());

    publish(mt, to);
    return r;
}

FlowTrace OverlapSystem::deliver_call(VlrId caller_vlr, Ptn callee) {
    const auto reg = registration(callee);
    if (!reg) {
        throw UnknownPtnError("callee PTN " + std::to_string(callee) + " is not registered");
    }
    const auto& caller = env_.vlr(caller_vlr);
    const auto& target = env_.vlr(reg->vlr);
    FlowTrace t;
    t.steps.push_back(step(Role::Vlr, caller_vlr, AccessKind::Query));

    auto& c = cache(caller_vlr);
    if (const auto hit = c.lookup(callee)) {
        if (hit->vlr == reg->vlr) {
            t.steps.push_back(step(Role::Nlr, caller_vlr, AccessKind::CacheHit));
            t.steps.push_back(step(Role::Vlr, reg->vlr, AccessKind::Connect));
            return t;
        }
        t.steps.push_back(step(Role::Nlr, caller_vlr, AccessKind::CacheStale));
        c.erase(callee);
    } else {
        t.steps.push_back(step(Role::Nlr, caller_vlr, AccessKind::CacheMiss));
    }

    t.steps.push_back(step(Role::Db1, caller.db1, AccessKind::Query));
    if (caller.network != target.network) {
        t.steps.push_back(step(Role::Db0, caller.network, AccessKind::Query));
        t.steps.push_back(step(Role::Db0, target.network, AccessKind::Query));
        t.steps.push_back(step(Role::Db1, target.db1, AccessKind::Query));
    } else if (caller.db1 != target.db1) {
        t.steps.push_back(step(Role::Db0, caller.network, AccessKind::Query));
        t.steps.push_back(step(Role::Db1, target.db1, AccessKind::Query));
    }
    t.steps.push_back(step(Role::Vlr, reg->vlr, AccessKind::Connect));
    c.insert({callee, reg->vlr, reg->network,
              caller.network == target.network ? NeighborLink::SameNetwork : NeighborLink::Interworking,
              0});
    return t;
}

// ---------------------------------------------------------------------------
// Scenarios

std::vector<Waypoint> parse_waypoints(std::istream& in) {
    std::vector<Waypoint> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            const auto a = field.find_first_not_of(" \t\r");
            const auto b = field.find_last_not_of(" \t\r");
            fields.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
        }
        const std::string where = "waypoint line " + std::to_string(line_no);
        if (fields.size() != 5) {
            throw ProtocolError(where + ": expected 5 fields, got " + std::to_string(fields.size()));
        }
        const auto real = [&](const std::string& s) {
            double v = 0.0;
            const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) {
                throw ProtocolError(where + ": bad number '" + s + "'");
            }
            return v;
        };
        const auto integer = [&](const std::string& s) {
            int v = 0;
            const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) {
                throw ProtocolError(where + ": bad integer '" + s + "'");
            }
            return v;
        };
        Waypoint w;
        w.t_s = real(fields[0]);
        w.region = integer(fields[1]);
        w.speed_kmh = real(fields[2]);
        w.heading = integer(fields[3]);
        const std::string& call = fields[4];
        if (call == "1" || call == "true") {
            w.in_call = true;
        } else if (call == "0" || call == "false") {
            w.in_call = false;
        } else {
            throw ProtocolError(where + ": in_call must be 0/1/true/false");
        }
        out.push_back(w);
    }
    return out;
}

std::string format_waypoint(const Waypoint& w) {
    char buf[32];
    std::string out;
    auto [p1, e1] = std::to_chars(buf, buf + sizeof buf, w.t_s);
    out.append(buf, p1);
    out += "," + std::to_string(w.region) + ",";
    auto [p2, e2] = std::to_chars(buf, buf + sizeof buf, w.speed_kmh);
    out.append(buf, p2);
    out += "," + std::to_string(w.heading) + "," + (w.in_call ? "1" : "0");
    return out;
}

ScenarioKind parse_scenario_kind(std::string_view text) {
    if (text == "a") {
        return ScenarioKind::SameNetwork;
    }
    if (text == "b") {
        return ScenarioKind::TwoNetworks;
    }
    if (text == "c") {
        return ScenarioKind::SeveralNetworks;
    }
    throw ProtocolError("scenario must be a, b or c");
}

NetworkEnv make_scenario_env(ScenarioKind which) {
    NetworkEnv env;
    env.add_network({1, "X", true});
    switch (which) {
        case ScenarioKind::SameNetwork:
            env.add_vlr({1, 1, 11, {10, 20}, 20.0, 3});
            env.add_vlr({2, 1, 11, {21, 30}, 20.0, 3});
            env.add_overlap(20, 21);
            break;
        case ScenarioKind::TwoNetworks:
            env.add_network({2, "Y", false});
            env.add_vlr({1, 1, 11, {10, 20}, 20.0, 3});
            env.add_vlr({2, 2, 21, {20, 30}, 20.0, 3});
            break;
        case ScenarioKind::SeveralNetworks:
            env.add_network({2, "Y", false});
            env.add_network({3, "Z", false});
            env.add_vlr({1, 1, 11, {10, 20}, 20.0, 3});
            env.add_vlr({2, 2, 21, {20, 30, 31}, 20.0, 3});
            env.add_vlr({3, 3, 31, {20, 40, 41}, 20.0, 3});
            break;
    }
    return env;
}

std::vector<Waypoint> default_waypoints(ScenarioKind which, bool in_call, double speed_kmh,
                                        NetworkId heading) {
    std::vector<Waypoint> w;
    w.push_back({0.0, 10, speed_kmh, heading, in_call});
    w.push_back({60.0, 20, speed_kmh, heading, in_call});
    if (which == ScenarioKind::SeveralNetworks) {
        const RegionId exit = heading == 3 ? 40 : 30;
        w.push_back({120.0, exit, speed_kmh, heading, in_call});
        w.push_back({180.0, exit + 1, speed_kmh, heading, in_call});
    } else {
        w.push_back({120.0, 30, speed_kmh, heading, in_call});
    }
    return w;
}

namespace {

void stamp(std::vector<TraceStep>::iterator first, std::vector<TraceStep>::iterator last, double t) {
    for (; first != last; ++first) {
        first->enqueue = first->start = first->finish = t;
    }
}

}  // namespace

ScenarioRun run_scenario(ScenarioKind which, const NetworkEnv& env, MobileTerminal mt,
                         std::span<const Waypoint> waypoints, const OverlapOptions& options) {
    const std::size_t needed = which == ScenarioKind::SeveralNetworks ? 4 : 3;
    if (waypoints.size() < needed) {
        throw ProtocolError("malformed waypoint list: scenario needs at least " +
                            std::to_string(needed) + " waypoints");
    }
    for (std::size_t i = 0; i < waypoints.size(); ++i) {
        if (i > 0 && waypoints[i].t_s < waypoints[i - 1].t_s) {
            throw ProtocolError("malformed waypoint list: time decreases at waypoint " +
                                std::to_string(i));
        }
        if (env.covering(waypoints[i].region).empty()) {
            throw ProtocolError("malformed waypoint list: region " +
                                std::to_string(waypoints[i].region) + " has no coverage");
        }
    }

    OverlapSystem sys(env, options);
    ScenarioRun run;
    const auto absorb = [&run](const HandoffResult& r) {
        run.trace.append(r.trace);
        for (const auto& op : r.pointer_ops) {
            if (op.kind == PointerOp::Kind::Create) {
                ++run.pointers_created;
            } else {
                ++run.pointers_removed;
            }
        }
    };

    for (std::size_t i = 0; i < waypoints.size(); ++i) {
        const Waypoint& w = waypoints[i];
        const std::size_t first_step = run.trace.steps.size();
        const std::size_t first_call = run.call_traces.size();
        mt.region = w.region;
        mt.in_call = w.in_call;
        mt.approach_kmh.clear();
        for (const auto& [id, net] : env.networks()) {
            mt.approach_kmh[id] = id == w.heading ? w.speed_kmh : -w.speed_kmh;
        }

        const std::vector<VlrId> covering = env.covering(w.region);
        const auto reg = sys.registration(mt.ptn());
        bool quiescent = true;
        if (!reg) {
            const auto scored = sys.score(mt, covering);
            run.trace.append(sys.attach(mt, choose_network(scored, options.rule).vlr));
        } else if (std::find(covering.begin(), covering.end(), reg->vlr) != covering.end()) {
            std::vector<VlrId> others;
            for (VlrId v : covering) {
                if (v != reg->vlr) {
                    others.push_back(v);
                }
            }
            if (others.empty()) {
                absorb(sys.clear_pointers(mt));
            } else {
                absorb(sys.enter_overlap(mt, others));
                if (!mt.in_call) {
                    absorb(sys.clear_pointers(mt));
                    const auto best = choose_network(sys.score(mt, covering), options.rule);
                    if (best.vlr != reg->vlr) {
                        absorb(sys.handoff(mt, reg->vlr, best.vlr));
                    }
                } else {
                    quiescent = sys.pointer_chain(mt.ptn()).empty();
                }
            }
        } else {
            std::vector<VlrId> reachable;
            for (VlrId v : covering) {
                if (sys.nlr(reg->vlr).lists(v)) {
                    reachable.push_back(v);
                }
            }
            if (reachable.empty()) {
                throw ProtocolError("malformed waypoint list: region " + std::to_string(w.region) +
                                    " is not reachable from VLR " + std::to_string(reg->vlr));
            }
            const auto best = choose_network(sys.score(mt, reachable), options.rule);
            absorb(sys.handoff(mt, reg->vlr, best.vlr));
        }

        ScenarioSnapshot snap;
        snap.waypoint = i;
        snap.registration = sys.registration(mt.ptn());
        snap.registrations = sys.registration_count(mt.ptn());
        snap.pointers = sys.pointer_chain(mt.ptn()).size();
        snap.quiescent = quiescent;
        snap.ptn = mt.ptn();
        run.max_pointers = std::max(run.max_pointers, snap.pointers);
        run.snapshots.push_back(snap);

        for (const auto& [id, info] : env.vlrs()) {
            if (snap.registration && id != snap.registration->vlr) {
                run.call_traces.push_back(sys.deliver_call(id, mt.ptn()));
            }
        }
        stamp(run.trace.steps.begin() + static_cast<std::ptrdiff_t>(first_step), run.trace.steps.end(), w.t_s);
        for (std::size_t c = first_call; c < run.call_traces.size(); ++c) {
            stamp(run.call_traces[c].steps.begin(), run.call_traces[c].steps.end(), w.t_s);
        }
    }
    run.final_registration = sys.registration(mt.ptn());
    return run;
}

}  // namespace locdb
