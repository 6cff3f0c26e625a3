#include "locdb/analytic.hpp"

#include <string>

#include "locdb/error.hpp"

namespace locdb {
namespace {

void check_level(int level) {
    if (level < 0 || level > 2) {
        throw ConfigError("database level must be 0, 1 or 2, got " + std::to_string(level));
    }
}

// Rate of requests reaching DB0 and the share of those needing a second
// (data-file) access.
struct Db0Mix {
    double total;   // (2q0+q1)lu + (2p0+p1)lc
    double double_; // (q0+q1)lu + (p0+p1)lc
    double single;  // q0*lu + p0*lc
};

Db0Mix db0_mix(const SystemParams& p, const WorkloadRates& w) {
    const double lu = w.lambda_u;
    const double lc = w.lambda_c;
    return {(2.0 * p.q0 + p.q1) * lu + (2.0 * p.p0 + p.p1) * lc,
            (p.q0 + p.q1) * lu + (p.p0 + p.p1) * lc,
            p.q0 * lu + p.p0 * lc};
}

QueueStats direct_stats(const SystemParams& p, const WorkloadRates& w, int level, double access) {
    check_level(level);
    const LevelRates rates = arrival_rates(p, w);
    QueueStats q;
    q.arrival_rate = rates.at(level);
    switch (level) {
        case 0: {
            const Db0Mix mix = db0_mix(p, w);
            if (!(mix.total > 0.0)) {
                throw Error("DB0 receives no load; its service mix is undefined");
            }
            q.mean_service = (1.0 + mix.double_ / mix.total) * access;
            q.var_service = mix.single * mix.double_ * access * access / (mix.total * mix.total);
            break;
        }
        case 1:
            q.mean_service = access;
            q.var_service = 0.0;
            break;
        case 2: {
            const double l2 = rates.lambda2;
            if (!(l2 > 0.0)) {
                throw Error("DB2 receives no load; its service mix is undefined");
            }
            const double lu = w.lambda_u;
            const double lc = w.lambda_c;
            const double psum = p.p0 + p.p1 + p.p2;
            q.mean_service = (4.0 * lu + (2.0 + psum) * lc) / l2 * access;
            q.var_service = (2.0 * lu + lc) * psum * lc * access * access / (l2 * l2);
            break;
        }
    }
    return q;
}

}  // namespace

std::string_view to_string(IndexChoice c) {
    switch (c) {
        case IndexChoice::MemoryDirect: return "memory-direct";
        case IndexChoice::TTreeIndex: return "ttree";
        case IndexChoice::DiskDirect: return "disk-direct";
    }
    return "unknown";
}

IndexChoice parse_index_choice(std::string_view text) {
    if (text == "memory-direct") {
        return IndexChoice::MemoryDirect;
    }
    if (text == "ttree" || text == "t-tree") {
        return IndexChoice::TTreeIndex;
    }
    if (text == "disk-direct") {
        return IndexChoice::DiskDirect;
    }
    throw ConfigError("unknown index '" + std::string(text) +
                      "' (expected memory-direct, ttree or disk-direct)");
}

double pk_response_time(const QueueStats& q) {
    if (!(q.mean_service > 0.0)) {
        throw ConfigError("mean service time must be positive");
    }
    if (q.var_service < 0.0) {
        throw ConfigError("service-time variance must be non-negative");
    }
    if (q.arrival_rate < 0.0) {
        throw ConfigError("arrival rate must be non-negative");
    }
    const double util = q.utilization();
    if (util >= 1.0) {
        throw SaturationError("queue saturated: utilization " + std::to_string(util), util);
    }
    const double second_moment = q.var_service + q.mean_service * q.mean_service;
    return q.mean_service + q.arrival_rate * second_moment / (2.0 * (1.0 - util));
}

double update_delay(const LevelDelays& d, double q0, double q1) {
    return 2.0 * d.T2 + (1.0 + q0 + q1) * d.T1 + (2.0 * q0 + q1) * d.T0;
}

double delivery_delay(const LevelDelays& d, double p0, double p1, double p2) {
    return (1.0 + p0 + p1 + p2) * d.T2 + (2.0 * p0 + 2.0 * p1 + p2) * d.T1 + (2.0 * p0 + p1) * d.T0;
}

TwoPointService direct_service_law(const SystemParams& p, const WorkloadRates& w, int level,
                                   double access_time) {
    check_level(level);
    TwoPointService law{access_time, 2.0 * access_time, 0.0};
    if (level == 0) {
        const Db0Mix mix = db0_mix(p, w);
        if (!(mix.total > 0.0)) {
            throw Error("DB0 receives no load; its service mix is undefined");
        }
        law.p_high = mix.double_ / mix.total;
    } else if (level == 2) {
        const double l2 = arrival_rates(p, w).lambda2;
        if (!(l2 > 0.0)) {
            throw Error("DB2 receives no load; its service mix is undefined");
        }
        law.p_high = (2.0 * w.lambda_u + w.lambda_c) / l2;
    }
    return law;
}

QueueStats service_db0_memdirect(const SystemParams& p, const WorkloadRates& w) {
    return direct_stats(p, w, 0, p.Ts);
}

QueueStats service_db1_memdirect(const SystemParams& p, const WorkloadRates& w) {
    return direct_stats(p, w, 1, p.Ts);
}

QueueStats service_db2_memdirect(const SystemParams& p, const WorkloadRates& w) {
    return direct_stats(p, w, 2, p.Ts);
}

QueueStats service_diskdirect(const SystemParams& p, const WorkloadRates& w, int level) {
    return direct_stats(p, w, level, p.Tb);
}

QueueStats service_ttree(const ServiceTimeEstimate& est, double level_rate) {
    if (est.sample_count < kMinServiceSamples) {
        throw InsufficientSamplesError("T-tree estimate has " + std::to_string(est.sample_count) +
                                       " samples; at least " + std::to_string(kMinServiceSamples) +
                                       " required");
    }
    return {est.mean, est.variance, level_rate};
}

bool storage_feasible_direct(const SystemParams& p, double residing, int level) {
    check_level(level);
    const double profile = level == 1 ? 0.0 : p.M_bytes;
    return p.Nt * p.Ei_bytes + residing * profile <= p.phi(level);
}

bool storage_feasible_ttree(const SystemParams& p, double entries, double residing, int level) {
    check_level(level);
    const double denom = p.kappa * p.Y1;
    if (!(denom > 0.0)) {
        throw ConfigError("kappa * Y1 must be positive");
    }
    const double profile = level == 1 ? 0.0 : p.M_bytes;
    const double node_bytes = 3.0 * p.a1_bytes + 2.0 * p.a2_bytes + p.Y1 * p.Ei_bytes;
    return entries * node_bytes / denom + residing * profile <= p.phi(level);
}

double ttree_entries(const SystemParams& p, int level) {
    check_level(level);
    return level == 0 ? p.Nt : residing_users(p, level);
}

SelectionInputs default_selection_inputs(const SystemParams& p, int level,
                                         const ServiceTimeEstimate& ttree) {
    return {residing_users(p, level), ttree_entries(p, level), ttree};
}

QueueStats level_queue_stats(const SystemParams& p, const WorkloadRates& w, int level,
                             IndexChoice choice, const ServiceTimeEstimate* ttree) {
    check_level(level);
    switch (choice) {
        case IndexChoice::MemoryDirect:
            return direct_stats(p, w, level, p.Ts);
        case IndexChoice::DiskDirect:
            return direct_stats(p, w, level, p.Tb);
        case IndexChoice::TTreeIndex:
            if (ttree == nullptr) {
                throw ConfigError("T-tree index requires a service-time estimate");
            }
            return service_ttree(*ttree, arrival_rates(p, w).at(level));
    }
    throw ConfigError("unknown index choice");
}

IndexChoice select_index(int level, const SystemParams& p, const SelectionInputs& in) {
    check_level(level);
    const WorkloadRates w = workload_rates(p);

    std::optional<IndexChoice> best;
    double best_time = 0.0;
    bool any_storage_feasible = false;
    for (IndexChoice c : {IndexChoice::MemoryDirect, IndexChoice::TTreeIndex, IndexChoice::DiskDirect}) {
        const bool fits = c == IndexChoice::TTreeIndex
                              ? storage_feasible_ttree(p, in.ttree_entries, in.residing, level)
                              : storage_feasible_direct(p, in.residing, level);
        if (!fits) {
            continue;
        }
        any_storage_feasible = true;
        double t = 0.0;
        try {
            t = pk_response_time(level_queue_stats(p, w, level, c, &in.ttree));
        } catch (const SaturationError&) {
            continue;
        }
        if (!best || t < best_time) {
            best = c;
            best_time = t;
        }
    }
    if (!best) {
        throw NoFeasibleChoiceError(
            any_storage_feasible
                ? "every storage-feasible index saturates at DB" + std::to_string(level)
                : "no index fits the storage capacity of DB" + std::to_string(level));
    }
    return *best;
}

std::vector<CurvePoint> response_curves(const SystemParams& p, std::span<const double> rho_sweep,
                                        IndexChoice choice, int level,
                                        const ServiceTimeEstimate* ttree) {
    check_level(level);
    if (rho_sweep.empty()) {
        throw ConfigError("density sweep is empty");
    }
    std::vector<CurvePoint> out;
    out.reserve(rho_sweep.size());
    for (double rho : rho_sweep) {
        SystemParams at = p;
        at.rho = rho;
        at.validate();
        CurvePoint point;
        point.rho = rho;
        point.level = level;
        point.choice = choice;
        point.stats = level_queue_stats(at, workload_rates(at), level, choice, ttree);
        try {
            point.response = pk_response_time(point.stats);
        } catch (const SaturationError&) {
            point.response.reset();
        }
        out.push_back(point);
    }
    return out;
}

}  // namespace locdb
