#pragma once

#include <algorithm>
#include <utility>

#include "locdb/index/ttree.hpp"

namespace locdb {

// Reaches into the node pool: corrupts trees for validation tests and
// re-walks them for cost recounts.
struct TTreeInspector {
    static void swap_root_items(TTree& t) {
        auto& items = t.nodes_[t.root_].items;
        std::swap(items[0], items[1]);
    }

    static void break_left_child_order(TTree& t) {
        const auto left = t.nodes_[t.root_].left;
        auto& n = t.nodes_[left];
        n.items.back().key = t.nodes_[t.root_].max_key + 1;
        n.max_key = n.items.back().key;
    }

    struct Walk {
        std::uint64_t nodes = 0;
        std::uint64_t probes = 0;  // binary-search probes in the bounding node
        bool found = false;
    };

    // Independent marked-node descent with its own binary search.
    static Walk walk(const TTree& t, Ptn key) {
        Walk w;
        TTree::NodeId cur = t.root_;
        TTree::NodeId marked = TTree::kNil;
        while (cur != TTree::kNil) {
            ++w.nodes;
            const auto& n = t.nodes_[cur];
            if (key < n.items.front().key) {
                cur = n.left;
            } else {
                marked = cur;
                cur = n.right;
            }
        }
        if (marked == TTree::kNil) {
            return w;
        }
        const auto& items = t.nodes_[marked].items;
        std::size_t lo = 0, hi = items.size();
        while (lo < hi) {
            ++w.probes;
            const std::size_t mid = lo + (hi - lo) / 2;
            if (items[mid].key == key) {
                w.found = true;
                break;
            }
            if (items[mid].key < key) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        return w;
    }
};

}  // namespace locdb
