#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "locdb/index/access_stats.hpp"
#include "locdb/index/direct_file.hpp"
#include "locdb/index/ttree.hpp"
#include "locdb/params.hpp"

namespace locdb {

/// Converts counted index work into service time (seconds).
///
/// cost = per_node * nodes_visited + per_comparison * comparisons
///      + per_bounding_search * bounding_searches + per_slot * slot_accesses
struct CostModel {
    double per_node = 0.0;
    double per_comparison = 0.0;
    double per_bounding_search = 0.0;
    double per_slot = 0.0;

    double cost(const AccessStats& s) const {
        return per_node * static_cast<double>(s.nodes_visited) +
               per_comparison * static_cast<double>(s.comparisons) +
               per_bounding_search * static_cast<double>(s.bounding_searches) +
               per_slot * static_cast<double>(s.slot_accesses);
    }

    /// Default T-tree pricing: c1*Tc per node traversal, c2*Tc per binary
    /// search of the bounding node, Tc per key comparison.
    static CostModel ttree(const SystemParams& p);

    /// Alternative pricing Tc*(c1*nodes_visited + c2*comparisons).
    static CostModel ttree_per_comparison(const SystemParams& p);

    /// Ts per slot access in memory, Tb on disk.
    static CostModel direct_file(const SystemParams& p, Residency residency);
};

struct ServiceTimeEstimate {
    double mean = 0.0;      ///< seconds
    double variance = 0.0;  ///< seconds^2, unbiased
    std::uint64_t sample_count = 0;
};

/// Sample mean and unbiased variance. Throws InsufficientSamplesError if empty.
ServiceTimeEstimate summarize(std::span<const double> samples);

std::vector<double> probe_costs(const TTree& tree, std::span<const Ptn> probes, const CostModel& cost);
std::vector<double> probe_costs(const DirectFile& file, std::span<const Ptn> probes,
                                const CostModel& cost);

ServiceTimeEstimate measure_service_time(const TTree& tree, std::span<const Ptn> probes,
                                         const CostModel& cost);
ServiceTimeEstimate measure_service_time(const DirectFile& file, std::span<const Ptn> probes,
                                         const CostModel& cost);

/// A T-tree filled with `keys` distinct random PTNs from [0, 2 * keys) and a
/// matching uniform probe stream over the same range.
struct TTreeWorkload {
    TTree tree;
    std::vector<Ptn> probes;
};

TTreeWorkload make_uniform_ttree_workload(const SystemParams& p, std::size_t keys, std::size_t probes,
                                          std::uint64_t seed);

/// Builds a uniform workload and measures it with CostModel::ttree(p).
ServiceTimeEstimate estimate_ttree_service(const SystemParams& p, std::size_t keys,
                                           std::size_t probes, std::uint64_t seed);

}  // namespace locdb
