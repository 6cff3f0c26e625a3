#pragma once

#include <cstdint>
#include <optional>

namespace locdb {

/// Personal telecommunication number: location independent, lifelong.
using Ptn = std::uint64_t;

/// Opaque reference into a data file. Indices never interpret it.
using Payload = std::uint64_t;

/// Work performed by one index operation.
struct AccessStats {
    std::uint64_t nodes_visited = 0;
    std::uint64_t comparisons = 0;
    /// 1 when a T-tree probe ended in a binary search of a bounding node.
    std::uint64_t bounding_searches = 0;
    std::uint64_t slot_accesses = 0;

    AccessStats& operator+=(const AccessStats& o) {
        nodes_visited += o.nodes_visited;
        comparisons += o.comparisons;
        bounding_searches += o.bounding_searches;
        slot_accesses += o.slot_accesses;
        return *this;
    }

    friend bool operator==(const AccessStats&, const AccessStats&) = default;
};

struct LookupResult {
    bool found = false;
    std::optional<Payload> payload;
    AccessStats stats;
};

}  // namespace locdb
