#include "locdb/index/service_time.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "locdb/error.hpp"

namespace locdb {

CostModel CostModel::ttree(const SystemParams& p) {
    CostModel m;
    m.per_node = p.c1 * p.Tc;
    m.per_bounding_search = p.c2 * p.Tc;
    m.per_comparison = p.Tc;
    return m;
}

CostModel CostModel::ttree_per_comparison(const SystemParams& p) {
    CostModel m;
    m.per_node = p.c1 * p.Tc;
    m.per_comparison = p.c2 * p.Tc;
    return m;
}

CostModel CostModel::direct_file(const SystemParams& p, Residency residency) {
    CostModel m;
    m.per_slot = residency == Residency::Memory ? p.Ts : p.Tb;
    return m;
}

ServiceTimeEstimate summarize(std::span<const double> samples) {
    if (samples.empty()) {
        throw InsufficientSamplesError("service-time workload is empty");
    }
    // Welford
    double mean = 0.0;
    double m2 = 0.0;
    std::uint64_t n = 0;
    for (double x : samples) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }
    ServiceTimeEstimate est;
    est.mean = mean;
    est.variance = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
    est.sample_count = n;
    return est;
}

std::vector<double> probe_costs(const TTree& tree, std::span<const Ptn> probes, const CostModel& cost) {
    std::vector<double> out;
    out.reserve(probes.size());
    for (Ptn key : probes) {
        out.push_back(cost.cost(tree.search(key).stats));
    }
    return out;
}

std::vector<double> probe_costs(const DirectFile& file, std::span<const Ptn> probes,
                                const CostModel& cost) {
    std::vector<double> out;
    out.reserve(probes.size());
    for (Ptn key : probes) {
        out.push_back(cost.cost(file.get(key).stats));
    }
    return out;
}

ServiceTimeEstimate measure_service_time(const TTree& tree, std::span<const Ptn> probes,
                                         const CostModel& cost) {
    if (probes.empty()) {
        throw InsufficientSamplesError("service-time workload is empty");
    }
    const auto samples = probe_costs(tree, probes, cost);
    return summarize(samples);
}

ServiceTimeEstimate measure_service_time(const DirectFile& file, std::span<const Ptn> probes,
                                         const CostModel& cost) {
    if (probes.empty()) {
        throw InsufficientSamplesError("service-time workload is empty");
    }
    const auto samples = probe_costs(file, probes, cost);
    return summarize(samples);
}

TTreeWorkload make_uniform_ttree_workload(const SystemParams& p, std::size_t keys, std::size_t probes,
                                          std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t universe = std::max<std::size_t>(2 * keys, 1);
    std::vector<Ptn> pool(universe);
    std::iota(pool.begin(), pool.end(), Ptn{0});
    std::shuffle(pool.begin(), pool.end(), rng);

    TTreeWorkload w{TTree(p.Y1, p.Y2), {}};
    for (std::size_t i = 0; i < keys; ++i) {
        w.tree.insert(pool[i], pool[i]);
    }
    std::uniform_int_distribution<Ptn> pick(0, universe - 1);
    w.probes.reserve(probes);
    for (std::size_t i = 0; i < probes; ++i) {
        w.probes.push_back(pick(rng));
    }
    return w;
}

ServiceTimeEstimate estimate_ttree_service(const SystemParams& p, std::size_t keys,
                                           std::size_t probes, std::uint64_t seed) {
    const auto w = make_uniform_ttree_workload(p, keys, probes, seed);
    return measure_service_time(w.tree, w.probes, CostModel::ttree(p));
}

}  // namespace locdb
