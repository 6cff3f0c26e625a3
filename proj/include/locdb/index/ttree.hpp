#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "locdb/index/access_stats.hpp"

namespace locdb {

/// First invariant violation found by TTree::validate(), or ok.
struct ValidationReport {
    bool ok = true;
    std::string node_path;  ///< "root", "root.L", "root.L.R", ...
    std::string message;

    explicit operator bool() const noexcept { return ok; }
};

/// Main-memory T-tree: an AVL-balanced binary tree whose nodes each hold up
/// to `max_items` sorted (key, payload) pairs.
///
/// Search follows the marked-node descent: go left while the probe is below
/// a node's minimum, otherwise mark the node and go right; at the bottom the
/// last marked (bounding) node is binary searched.
///
/// Nodes with two children aim to keep at least `min_interior` items. After
/// deletions and rotations they borrow from the greatest-lower-bound node
/// (then the least-upper-bound node) as long as the donor keeps one item, so
/// the occupancy floor is a target rather than a hard invariant.
///
/// Single writer, multiple readers; no internal synchronization.
class TTree {
public:
    struct Item {
        Ptn key;
        Payload payload;
    };

    explicit TTree(int max_items = 15, int min_interior = 8);

    /// Throws DuplicateKeyError (tree unchanged) if `key` is present.
    void insert(Ptn key, Payload payload);

    /// Throws KeyNotFoundError (tree unchanged) if `key` is absent.
    void erase(Ptn key);

    LookupResult search(Ptn key) const;
    bool contains(Ptn key) const { return search(key).found; }

    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }
    std::size_t node_count() const noexcept { return nodes_.size() - free_.size(); }
    int height() const noexcept;
    int max_items() const noexcept { return max_items_; }
    int min_interior() const noexcept { return min_interior_; }

    /// Keys in in-order traversal order.
    std::vector<Ptn> keys() const;

    /// Nodes with two children holding fewer than min_interior items.
    std::size_t underfull_interior_nodes() const;

    ValidationReport validate() const;

    void clear();

private:
    friend struct TTreeInspector;

    using NodeId = std::int32_t;
    static constexpr NodeId kNil = -1;

    struct Node {
        std::vector<Item> items;
        Ptn min_key = 0;
        Ptn max_key = 0;
        NodeId parent = kNil;
        NodeId left = kNil;
        NodeId right = kNil;
        int height = 1;
    };

    NodeId allocate(Item item, NodeId parent);
    void release(NodeId id);
    void refresh_bounds(NodeId id);
    int node_height(NodeId id) const noexcept;
    void update_height(NodeId id);
    int balance_factor(NodeId id) const;
    void replace_child(NodeId parent, NodeId old_child, NodeId new_child);
    NodeId rotate_left(NodeId x);
    NodeId rotate_right(NodeId x);
    void rebalance_from(NodeId id);
    NodeId rightmost(NodeId id) const;
    NodeId leftmost(NodeId id) const;
    bool is_interior(NodeId id) const;
    void fill_interior(NodeId id);
    void unlink_node(NodeId id);
    NodeId find_bounding(Ptn key) const;

    std::vector<Node> nodes_;
    std::vector<NodeId> free_;
    NodeId root_ = kNil;
    std::size_t size_ = 0;
    int max_items_;
    int min_interior_;
};

}  // namespace locdb
