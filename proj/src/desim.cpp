#include "locdb/desim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <queue>
#include <random>
#include <string>

#include "locdb/error.hpp"

namespace locdb {

// ---------------------------------------------------------------------------
// Topology

Hierarchy::Hierarchy(int n0, int n1) : n0_(n0), n1_(n1) {
    if (n1 < 1 || n0 < n1 || n0 % n1 != 0) {
        throw TopologyError("invalid hierarchy: n0=" + std::to_string(n0) + ", n1=" +
                            std::to_string(n1) + " (need n0 >= n1 >= 1 and n1 | n0)");
    }
}

int Hierarchy::nodes_at(int level) const {
    switch (level) {
        case 0: return 1;
        case 1: return db1_count();
        case 2: return db2_count();
        default: throw TopologyError("level must be 0, 1 or 2");
    }
}

int Hierarchy::parent_db1(int db2) const {
    if (db2 < 0 || db2 >= n0_) {
        throw TopologyError("DB2 index out of range: " + std::to_string(db2));
    }
    return db2 / n1_;
}

int Hierarchy::flat_index(int level, int node) const {
    switch (level) {
        case 0: return 0;
        case 1: return 1 + node;
        case 2: return 1 + db1_count() + node;
        default: throw TopologyError("level must be 0, 1 or 2");
    }
}

Hierarchy build_topology(const SystemParams& p) { return Hierarchy(p.n0, p.n1); }

// ---------------------------------------------------------------------------
// Event classes

std::array<double, 3> update_class_probabilities(const SystemParams& p) {
    return {1.0 - p.q0 - p.q1, p.q1, p.q0};
}

std::array<double, 4> call_class_probabilities(const SystemParams& p) {
    return {1.0 - p.p0 - p.p1 - p.p2, p.p2, p.p1, p.p0};
}

UpdateClass update_class_from_uniform(const SystemParams& p, double u) {
    if (u < p.q0) {
        return UpdateClass::NewDb0;
    }
    if (u < p.q0 + p.q1) {
        return UpdateClass::NewDb1SameDb0;
    }
    return UpdateClass::SameDb1Move;
}

CallClass call_class_from_uniform(const SystemParams& p, double u) {
    if (u < p.p0) {
        return CallClass::DiffDb0;
    }
    if (u < p.p0 + p.p1) {
        return CallClass::SameDb0DiffDb1;
    }
    if (u < p.p0 + p.p1 + p.p2) {
        return CallClass::SameDb1DiffDb2;
    }
    return CallClass::SameDb2;
}

namespace {

FlowTrace skeleton(std::initializer_list<Role> roles, AccessKind kind) {
    FlowTrace t;
    for (Role r : roles) {
        t.steps.push_back({r, 0, kind, 0.0, 0.0, 0.0, -1});
    }
    return t;
}

Role level_role(int level) {
    return level == 0 ? Role::Db0 : level == 1 ? Role::Db1 : Role::Db2;
}

}  // namespace

FlowTrace access_path_for_update(UpdateClass c) {
    using R = Role;
    switch (c) {
        case UpdateClass::SameDb1Move:
            return skeleton({R::Db2, R::Db2, R::Db1}, AccessKind::Update);
        case UpdateClass::NewDb1SameDb0:
            return skeleton({R::Db2, R::Db2, R::Db1, R::Db0, R::Db1}, AccessKind::Update);
        case UpdateClass::NewDb0:
            return skeleton({R::Db2, R::Db2, R::Db1, R::Db0, R::Db0, R::Db1}, AccessKind::Update);
    }
    return {};
}

FlowTrace access_path_for_call(CallClass c) {
    using R = Role;
    switch (c) {
        case CallClass::SameDb2:
            return skeleton({R::Db2}, AccessKind::Query);
        case CallClass::SameDb1DiffDb2:
            return skeleton({R::Db2, R::Db1, R::Db2}, AccessKind::Query);
        case CallClass::SameDb0DiffDb1:
            return skeleton({R::Db2, R::Db1, R::Db0, R::Db1, R::Db2}, AccessKind::Query);
        case CallClass::DiffDb0:
            return skeleton({R::Db2, R::Db1, R::Db0, R::Db0, R::Db1, R::Db2}, AccessKind::Query);
    }
    return {};
}

// ---------------------------------------------------------------------------
// Simulation

double ServiceSampler::mean() const {
    if (empirical.empty()) {
        return two_point.mean();
    }
    double sum = 0.0;
    for (double x : empirical) {
        sum += x;
    }
    return sum / static_cast<double>(empirical.size());
}

std::array<ServiceSampler, 3> service_samplers(const SystemParams& p, const SimConfig& cfg) {
    const WorkloadRates w = workload_rates(p);
    std::array<ServiceSampler, 3> out;
    for (int level = 0; level < 3; ++level) {
        switch (cfg.choices[level]) {
            case IndexChoice::MemoryDirect:
                out[level].two_point = direct_service_law(p, w, level, p.Ts);
                break;
            case IndexChoice::DiskDirect:
                out[level].two_point = direct_service_law(p, w, level, p.Tb);
                break;
            case IndexChoice::TTreeIndex:
                if (cfg.ttree_costs[level].size() < kMinServiceSamples) {
                    throw InsufficientSamplesError("DB" + std::to_string(level) +
                                                   " T-tree needs at least " +
                                                   std::to_string(kMinServiceSamples) +
                                                   " per-probe cost samples");
                }
                out[level].empirical = cfg.ttree_costs[level];
                break;
        }
    }
    return out;
}

namespace {

constexpr int kBins = 3000;
constexpr int kMaxPath = 6;
// Student t, 0.995 quantile, kBatches - 1 = 29 degrees of freedom.
constexpr double kT99 = 2.756;
constexpr double kZ99 = 2.576;

struct Job {
    int flow;
    double arrival;
};

struct Station {
    int level = 0;
    int node = 0;
    bool busy = false;
    std::deque<Job> queue;
};

struct Flow {
    double start = 0.0;
    bool update = false;
    int length = 0;
    int next = 0;
    std::array<int, kMaxPath> stations{};
};

enum class EventType : std::uint8_t { NewFlow, Departure };

struct Event {
    double time;
    std::uint64_t seq;
    EventType type;
    int station;

    bool operator>(const Event& o) const {
        return time != o.time ? time > o.time : seq > o.seq;
    }
};

struct Tally {
    double sum = 0.0;
    double sumsq = 0.0;
    std::uint64_t count = 0;

    void add(double x) {
        sum += x;
        sumsq += x * x;
        ++count;
    }
    Tally& operator+=(const Tally& o) {
        sum += o.sum;
        sumsq += o.sumsq;
        count += o.count;
        return *this;
    }
};

struct Summary {
    double mean = 0.0;
    double var = 0.0;
    double ci = 0.0;
    std::uint64_t count = 0;
};

Summary summarize_bins(const std::vector<Tally>& bins, int start_bin) {
    Summary s;
    Tally total;
    for (int b = start_bin; b < kBins; ++b) {
        total += bins[b];
    }
    s.count = total.count;
    if (total.count == 0) {
        return s;
    }
    const double n = static_cast<double>(total.count);
    s.mean = total.sum / n;
    if (total.count > 1) {
        s.var = std::max(0.0, (total.sumsq - n * s.mean * s.mean) / (n - 1.0));
    }

    const int span = kBins - start_bin;
    std::vector<double> batch_means;
    for (int k = 0; k < kBatches; ++k) {
        const int lo = start_bin + span * k / kBatches;
        const int hi = start_bin + span * (k + 1) / kBatches;
        Tally batch;
        for (int b = lo; b < hi; ++b) {
            batch += bins[b];
        }
        if (batch.count > 0) {
            batch_means.push_back(batch.sum / static_cast<double>(batch.count));
        }
    }
    if (batch_means.size() > 1) {
        double m = 0.0;
        for (double x : batch_means) {
            m += x;
        }
        m /= static_cast<double>(batch_means.size());
        double ss = 0.0;
        for (double x : batch_means) {
            ss += (x - m) * (x - m);
        }
        const double k = static_cast<double>(batch_means.size());
        s.ci = kT99 * std::sqrt(ss / (k - 1.0) / k);
    }
    return s;
}

std::mt19937_64 stream(std::uint64_t seed, std::uint32_t id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), id};
    return std::mt19937_64(seq);
}

class Engine {
public:
    Engine(const SystemParams& p, const SimConfig& cfg, std::array<ServiceSampler, 3> samplers)
        : p_(p),
          cfg_(cfg),
          topo_(build_topology(p)),
          samplers_(std::move(samplers)),
          arrival_rng_(stream(cfg.seed, 1)),
          class_rng_(stream(cfg.seed, 2)),
          routing_rng_(stream(cfg.seed, 3)),
          service_rng_(stream(cfg.seed, 4)),
          bin_width_(cfg.horizon_s / kBins) {
        stations_.resize(static_cast<std::size_t>(topo_.total_nodes()));
        for (int level = 0; level < 3; ++level) {
            for (int n = 0; n < topo_.nodes_at(level); ++n) {
                auto& st = stations_[topo_.flat_index(level, n)];
                st.level = level;
                st.node = n;
            }
            arrivals_[level].assign(kBins, 0);
            responses_[level].assign(kBins, Tally{});
        }
        update_delays_.assign(kBins, Tally{});
        call_delays_.assign(kBins, Tally{});
        const WorkloadRates w = workload_rates(p);
        per_ra_rate_ = w.lambda_u + w.lambda_c;
        update_share_ = per_ra_rate_ > 0.0 ? w.lambda_u / per_ra_rate_ : 0.0;
        total_rate_ = per_ra_rate_ * topo_.db2_count();
    }

    SimMetrics run() {
        SimMetrics m;
        m.horizon = cfg_.horizon_s;
        if (!(total_rate_ > 0.0)) {
            return m;
        }
        schedule_next_flow(0.0);
        while (!events_.empty()) {
            const Event e = events_.top();
            if (e.time > cfg_.horizon_s) {
                break;
            }
            events_.pop();
            now_ = e.time;
            if (e.type == EventType::NewFlow) {
                start_flow();
                schedule_next_flow(now_);
            } else {
                depart(e.station);
            }
        }
        return collect();
    }

private:
    int bin_of(double t) const {
        return std::min(kBins - 1, static_cast<int>(t / bin_width_));
    }

    void push(double time, EventType type, int station) {
        events_.push({time, seq_++, type, station});
    }

    void schedule_next_flow(double from) {
        std::exponential_distribution<double> gap(total_rate_);
        const double t = from + gap(arrival_rng_);
        if (t <= cfg_.horizon_s) {
            push(t, EventType::NewFlow, -1);
        }
    }

    int uniform(int n) {
        return std::uniform_int_distribution<int>(0, n - 1)(routing_rng_);
    }

    int sibling_db2(int db2) {
        const int per = topo_.db2_per_db1();
        if (per == 1) {
            return db2;
        }
        const int base = topo_.parent_db1(db2) * per;
        int k = uniform(per - 1);
        if (base + k >= db2) {
            ++k;
        }
        return base + k;
    }

    int db2_in_other_db1(int db2) {
        const int groups = topo_.db1_count();
        if (groups == 1) {
            return uniform(topo_.db2_count());
        }
        int g = uniform(groups - 1);
        if (g >= topo_.parent_db1(db2)) {
            ++g;
        }
        return g * topo_.db2_per_db1() + uniform(topo_.db2_per_db1());
    }

    int s0() const { return topo_.flat_index(0, 0); }
    int s1(int db2) const { return topo_.flat_index(1, topo_.parent_db1(db2)); }
    int s2(int db2) const { return topo_.flat_index(2, db2); }

    void start_flow() {
        ++events_generated_;
        if (events_generated_ == kWarmupEvents) {
            warmup_event_time_ = now_;
        }
        const int origin = uniform(topo_.db2_count());
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        const bool is_update = u01(class_rng_) < update_share_;
        const double u = u01(class_rng_);

        Flow f;
        f.start = now_;
        f.update = is_update;
        auto add = [&f](int station) { f.stations[f.length++] = station; };
        if (is_update) {
            switch (update_class_from_uniform(p_, u)) {
                case UpdateClass::SameDb1Move: {
                    const int old = sibling_db2(origin);
                    add(s2(origin)); add(s2(old)); add(s1(origin));
                    break;
                }
                case UpdateClass::NewDb1SameDb0: {
                    const int old = db2_in_other_db1(origin);
                    add(s2(origin)); add(s2(old)); add(s1(origin)); add(s0()); add(s1(old));
                    break;
                }
                case UpdateClass::NewDb0: {
                    const int old = uniform(topo_.db2_count());
                    add(s2(origin)); add(s2(old)); add(s1(origin)); add(s0()); add(s0()); add(s1(old));
                    break;
                }
            }
        } else {
            switch (call_class_from_uniform(p_, u)) {
                case CallClass::SameDb2:
                    add(s2(origin));
                    break;
                case CallClass::SameDb1DiffDb2: {
                    const int callee = sibling_db2(origin);
                    add(s2(origin)); add(s1(origin)); add(s2(callee));
                    break;
                }
                case CallClass::SameDb0DiffDb1: {
                    const int callee = db2_in_other_db1(origin);
                    add(s2(origin)); add(s1(origin)); add(s0()); add(s1(callee)); add(s2(callee));
                    break;
                }
                case CallClass::DiffDb0: {
                    const int callee = uniform(topo_.db2_count());
                    add(s2(origin)); add(s1(origin)); add(s0()); add(s0()); add(s1(callee)); add(s2(callee));
                    break;
                }
            }
        }

        int id;
        if (!free_flows_.empty()) {
            id = free_flows_.back();
            free_flows_.pop_back();
            flows_[id] = f;
        } else {
            id = static_cast<int>(flows_.size());
            flows_.push_back(f);
        }
        arrive(id);
    }

    void trace(const Station& st, AccessKind kind) {
        if (cfg_.trace != nullptr) {
            *cfg_.trace << format_trace_line({now_, level_role(st.level), st.node, kind,
                                              st.queue.size()})
                        << '\n';
        }
    }

    void arrive(int flow_id) {
        Flow& f = flows_[flow_id];
        const int station = f.stations[f.next];
        Station& st = stations_[station];
        ++enqueued_;
        ++arrivals_[st.level][bin_of(now_)];
        st.queue.push_back({flow_id, now_});
        trace(st, AccessKind::Arrive);
        if (!st.busy) {
            begin_service(station);
        }
    }

    void begin_service(int station) {
        Station& st = stations_[station];
        st.busy = true;
        const double s = samplers_[st.level].sample(service_rng_);
        push(now_ + s, EventType::Departure, station);
        trace(st, AccessKind::Start);
    }

    void depart(int station) {
        Station& st = stations_[station];
        const Job job = st.queue.front();
        st.queue.pop_front();
        st.busy = false;
        ++completed_;
        responses_[st.level][bin_of(job.arrival)].add(now_ - job.arrival);
        trace(st, AccessKind::Finish);

        Flow& f = flows_[job.flow];
        ++f.next;
        if (f.next < f.length) {
            arrive(job.flow);
        } else {
            auto& delays = f.update ? update_delays_ : call_delays_;
            delays[bin_of(f.start)].add(now_ - f.start);
            free_flows_.push_back(job.flow);
        }
        if (!st.busy && !st.queue.empty()) {
            begin_service(station);
        }
    }

    SimMetrics collect() {
        SimMetrics m;
        m.horizon = cfg_.horizon_s;
        m.events_generated = events_generated_;
        m.accesses_enqueued = enqueued_;
        m.accesses_completed = completed_;
        m.accesses_in_flight = enqueued_ - completed_;

        if (events_generated_ < kWarmupEvents) {
            throw SimulationError("horizon too short for warm-up: only " +
                                  std::to_string(events_generated_) + " events before the horizon");
        }
        const double warm = std::max(kWarmupFraction * cfg_.horizon_s, warmup_event_time_);
        const int start_bin = static_cast<int>(std::ceil(warm / bin_width_ - 1e-9));
        if (start_bin > kBins - kBatches) {
            throw SimulationError("horizon too short for warm-up: warm-up ends at " +
                                  std::to_string(warm) + " s of " +
                                  std::to_string(cfg_.horizon_s) + " s");
        }
        m.warmup_end = start_bin * bin_width_;
        const double duration = cfg_.horizon_s - m.warmup_end;

        for (int level = 0; level < 3; ++level) {
            auto& out = m.levels[level];
            const Summary s = summarize_bins(responses_[level], start_bin);
            out.completed = s.count;
            out.mean_response = s.mean;
            out.var_response = s.var;
            out.ci_halfwidth = s.ci;
            std::uint64_t arrivals = 0;
            for (int b = start_bin; b < kBins; ++b) {
                arrivals += arrivals_[level][b];
            }
            out.arrivals = arrivals;
            const double denom = topo_.nodes_at(level) * duration;
            out.rate_per_node = static_cast<double>(arrivals) / denom;
            out.rate_ci_halfwidth = kZ99 * std::sqrt(static_cast<double>(arrivals)) / denom;
        }
        const Summary tu = summarize_bins(update_delays_, start_bin);
        const Summary td = summarize_bins(call_delays_, start_bin);
        m.T_u = tu.mean;
        m.T_u_ci_halfwidth = tu.ci;
        m.updates_measured = tu.count;
        m.T_d = td.mean;
        m.T_d_ci_halfwidth = td.ci;
        m.calls_measured = td.count;
        return m;
    }

    const SystemParams& p_;
    const SimConfig& cfg_;
    Hierarchy topo_;
    std::array<ServiceSampler, 3> samplers_;
    std::mt19937_64 arrival_rng_;
    std::mt19937_64 class_rng_;
    std::mt19937_64 routing_rng_;
    std::mt19937_64 service_rng_;

    double bin_width_;
    double per_ra_rate_ = 0.0;
    double update_share_ = 0.0;
    double total_rate_ = 0.0;
    double now_ = 0.0;
    std::uint64_t seq_ = 0;

    std::vector<Station> stations_;
    std::vector<Flow> flows_;
    std::vector<int> free_flows_;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;

    std::uint64_t events_generated_ = 0;
    double warmup_event_time_ = std::numeric_limits<double>::infinity();
    std::uint64_t enqueued_ = 0;
    std::uint64_t completed_ = 0;

    std::array<std::vector<std::uint64_t>, 3> arrivals_;
    std::array<std::vector<Tally>, 3> responses_;
    std::vector<Tally> update_delays_;
    std::vector<Tally> call_delays_;
};

}  // namespace

SimMetrics run_simulation(const SystemParams& p, const SimConfig& cfg) {
    p.validate();
    if (!(cfg.horizon_s > 0.0)) {
        throw SimulationError("horizon must be positive");
    }
    const WorkloadRates w = workload_rates(p);
    if (!(w.lambda_u + w.lambda_c > 0.0)) {
        SimMetrics empty;
        empty.horizon = cfg.horizon_s;
        return empty;
    }

    auto samplers = service_samplers(p, cfg);
    const LevelRates rates = arrival_rates(p, w);
    bool saturated = false;
    for (int level = 0; level < 3; ++level) {
        const double util = rates.at(level) * samplers[level].mean();
        if (util >= 1.0) {
            saturated = true;
            if (!cfg.allow_saturation) {
                throw SaturationError("DB" + std::to_string(level) + " saturated (utilization " +
                                          std::to_string(util) + ")",
                                      util);
            }
        }
    }

    Engine engine(p, cfg, std::move(samplers));
    SimMetrics m = engine.run();
    m.saturated = saturated;
    return m;
}

// ---------------------------------------------------------------------------
// GSM baseline

void GsmRegistry::register_mt(Ptn ptn, int serving_vlr) { serving_[ptn] = serving_vlr; }

const int* GsmRegistry::serving_vlr(Ptn ptn) const {
    const auto it = serving_.find(ptn);
    return it == serving_.end() ? nullptr : &it->second;
}

FlowTrace gsm_baseline_flow(const GsmRegistry& registry, int calling_msc, Ptn callee) {
    const int* vlr = registry.serving_vlr(callee);
    if (vlr == nullptr) {
        throw UnknownPtnError("callee PTN " + std::to_string(callee) + " is not registered");
    }
    FlowTrace t;
    t.steps.push_back({Role::CallingMsc, calling_msc, AccessKind::CallSetup});
    t.steps.push_back({Role::Hlr, 0, AccessKind::LocationQuery});
    t.steps.push_back({Role::ServingVlr, *vlr, AccessKind::RouteRequest});
    t.steps.push_back({Role::ServingMsc, *vlr, AccessKind::TldnAllocate});
    t.steps.push_back({Role::Hlr, 0, AccessKind::TldnRelay});
    return t;
}

}  // namespace locdb
