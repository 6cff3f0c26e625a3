#include "locdb/index/ttree.hpp"

#include <algorithm>
#include <functional>
#include <optional>

#include "locdb/error.hpp"

namespace locdb {

TTree::TTree(int max_items, int min_interior)
    : max_items_(max_items), min_interior_(min_interior) {
    if (max_items_ < 1) {
        throw ConfigError("T-tree node capacity must be >= 1");
    }
    if (min_interior_ < 1 || min_interior_ > max_items_) {
        throw ConfigError("T-tree interior occupancy must be in [1, capacity]");
    }
}

TTree::NodeId TTree::allocate(Item item, NodeId parent) {
    NodeId id;
    if (!free_.empty()) {
        id = free_.back();
        free_.pop_back();
        nodes_[id] = Node{};
    } else {
        id = static_cast<NodeId>(nodes_.size());
        nodes_.emplace_back();
    }
    Node& n = nodes_[id];
    n.items.reserve(static_cast<std::size_t>(max_items_));
    n.items.push_back(item);
    n.parent = parent;
    refresh_bounds(id);
    return id;
}

void TTree::release(NodeId id) {
    nodes_[id] = Node{};
    free_.push_back(id);
}

void TTree::refresh_bounds(NodeId id) {
    Node& n = nodes_[id];
    if (!n.items.empty()) {
        n.min_key = n.items.front().key;
        n.max_key = n.items.back().key;
    }
}

int TTree::node_height(NodeId id) const noexcept {
    return id == kNil ? 0 : nodes_[id].height;
}

void TTree::update_height(NodeId id) {
    Node& n = nodes_[id];
    n.height = 1 + std::max(node_height(n.left), node_height(n.right));
}

int TTree::balance_factor(NodeId id) const {
    return node_height(nodes_[id].left) - node_height(nodes_[id].right);
}

int TTree::height() const noexcept { return node_height(root_); }

void TTree::replace_child(NodeId parent, NodeId old_child, NodeId new_child) {
    if (parent == kNil) {
        root_ = new_child;
    } else if (nodes_[parent].left == old_child) {
        nodes_[parent].left = new_child;
    } else {
        nodes_[parent].right = new_child;
    }
    if (new_child != kNil) {
        nodes_[new_child].parent = parent;
    }
}

TTree::NodeId TTree::rotate_left(NodeId x) {
    const NodeId y = nodes_[x].right;
    const NodeId parent = nodes_[x].parent;
    nodes_[x].right = nodes_[y].left;
    if (nodes_[y].left != kNil) {
        nodes_[nodes_[y].left].parent = x;
    }
    nodes_[y].left = x;
    nodes_[x].parent = y;
    replace_child(parent, x, y);
    update_height(x);
    update_height(y);
    return y;
}

TTree::NodeId TTree::rotate_right(NodeId x) {
    const NodeId y = nodes_[x].left;
    const NodeId parent = nodes_[x].parent;
    nodes_[x].left = nodes_[y].right;
    if (nodes_[y].right != kNil) {
        nodes_[nodes_[y].right].parent = x;
    }
    nodes_[y].right = x;
    nodes_[x].parent = y;
    replace_child(parent, x, y);
    update_height(x);
    update_height(y);
    return y;
}

void TTree::rebalance_from(NodeId id) {
    for (NodeId n = id; n != kNil; n = nodes_[n].parent) {
        update_height(n);
        const int bf = balance_factor(n);
        if (bf > 1) {
            if (balance_factor(nodes_[n].left) < 0) {
                rotate_left(nodes_[n].left);
            }
            n = rotate_right(n);
        } else if (bf < -1) {
            if (balance_factor(nodes_[n].right) > 0) {
                rotate_right(nodes_[n].right);
            }
            n = rotate_left(n);
        } else {
            continue;
        }
        // A former leaf can surface as an interior node holding a single
        // item after a double rotation.
        fill_interior(n);
        if (nodes_[n].left != kNil) {
            fill_interior(nodes_[n].left);
        }
        if (nodes_[n].right != kNil) {
            fill_interior(nodes_[n].right);
        }
    }
}

TTree::NodeId TTree::rightmost(NodeId id) const {
    while (nodes_[id].right != kNil) {
        id = nodes_[id].right;
    }
    return id;
}

TTree::NodeId TTree::leftmost(NodeId id) const {
    while (nodes_[id].left != kNil) {
        id = nodes_[id].left;
    }
    return id;
}

bool TTree::is_interior(NodeId id) const {
    return nodes_[id].left != kNil && nodes_[id].right != kNil;
}

void TTree::fill_interior(NodeId id) {
    const auto floor = static_cast<std::size_t>(min_interior_);
    while (is_interior(id) && nodes_[id].items.size() < floor) {
        const NodeId glb = rightmost(nodes_[id].left);
        if (nodes_[glb].items.size() > 1) {
            nodes_[id].items.insert(nodes_[id].items.begin(), nodes_[glb].items.back());
            nodes_[glb].items.pop_back();
            refresh_bounds(glb);
            refresh_bounds(id);
            continue;
        }
        const NodeId lub = leftmost(nodes_[id].right);
        if (nodes_[lub].items.size() > 1) {
            nodes_[id].items.push_back(nodes_[lub].items.front());
            nodes_[lub].items.erase(nodes_[lub].items.begin());
            refresh_bounds(lub);
            refresh_bounds(id);
            continue;
        }
        break;
    }
}

// Removes a node with at most one child and rebalances above it.
void TTree::unlink_node(NodeId id) {
    const NodeId child = nodes_[id].left != kNil ? nodes_[id].left : nodes_[id].right;
    const NodeId parent = nodes_[id].parent;
    replace_child(parent, id, child);
    release(id);
    if (parent != kNil) {
        rebalance_from(parent);
    }
}

TTree::NodeId TTree::find_bounding(Ptn key) const {
    NodeId n = root_;
    while (n != kNil) {
        const Node& node = nodes_[n];
        if (key < node.min_key) {
            n = node.left;
        } else if (key > node.max_key) {
            n = node.right;
        } else {
            return n;
        }
    }
    return kNil;
}

void TTree::insert(Ptn key, Payload payload) {
    const Item item{key, payload};
    if (root_ == kNil) {
        root_ = allocate(item, kNil);
        size_ = 1;
        return;
    }

    const auto capacity = static_cast<std::size_t>(max_items_);
    const auto by_key = [](const Item& a, Ptn k) { return a.key < k; };

    NodeId n = root_;
    while (true) {
        Node& node = nodes_[n];
        if (key < node.min_key) {
            if (node.left == kNil) {
                break;
            }
            n = node.left;
        } else if (key > node.max_key) {
            if (node.right == kNil) {
                break;
            }
            n = node.right;
        } else {
            auto it = std::lower_bound(node.items.begin(), node.items.end(), key, by_key);
            if (it != node.items.end() && it->key == key) {
                throw DuplicateKeyError("duplicate key " + std::to_string(key));
            }
            node.items.insert(it, item);
            ++size_;
            if (node.items.size() <= capacity) {
                refresh_bounds(n);
                return;
            }
            // Overflow: the bounding node keeps its upper items and the old
            // minimum moves down to the greatest-lower-bound position.
            const Item spill = node.items.front();
            node.items.erase(node.items.begin());
            refresh_bounds(n);
            if (node.left == kNil) {
                const NodeId leaf = allocate(spill, n);
                nodes_[n].left = leaf;
                rebalance_from(n);
                return;
            }
            const NodeId glb = rightmost(node.left);
            if (nodes_[glb].items.size() < capacity) {
                nodes_[glb].items.push_back(spill);
                refresh_bounds(glb);
                return;
            }
            const NodeId leaf = allocate(spill, glb);
            nodes_[glb].right = leaf;
            rebalance_from(glb);
            return;
        }
    }

    // No bounding node: n is the last node on the search path and the key
    // falls just outside its range on a side with no child.
    Node& node = nodes_[n];
    const bool goes_left = key < node.min_key;
    if (node.items.size() < capacity) {
        if (goes_left) {
            node.items.insert(node.items.begin(), item);
        } else {
            node.items.push_back(item);
        }
        refresh_bounds(n);
        ++size_;
        return;
    }
    const NodeId leaf = allocate(item, n);
    if (goes_left) {
        nodes_[n].left = leaf;
    } else {
        nodes_[n].right = leaf;
    }
    ++size_;
    rebalance_from(n);
}

void TTree::erase(Ptn key) {
    const NodeId n = find_bounding(key);
    const auto by_key = [](const Item& a, Ptn k) { return a.key < k; };
    if (n == kNil) {
        throw KeyNotFoundError("key not found " + std::to_string(key));
    }
    auto& items = nodes_[n].items;
    auto it = std::lower_bound(items.begin(), items.end(), key, by_key);
    if (it == items.end() || it->key != key) {
        throw KeyNotFoundError("key not found " + std::to_string(key));
    }
    items.erase(it);
    --size_;

    if (!items.empty()) {
        refresh_bounds(n);
        if (is_interior(n)) {
            fill_interior(n);
            return;
        }
        // Half-leaf absorbs its leaf child when the union fits in one node.
        const NodeId child = nodes_[n].left != kNil ? nodes_[n].left : nodes_[n].right;
        if (child != kNil && nodes_[child].left == kNil && nodes_[child].right == kNil &&
            nodes_[n].items.size() + nodes_[child].items.size() <=
                static_cast<std::size_t>(max_items_)) {
            auto& mine = nodes_[n].items;
            auto& theirs = nodes_[child].items;
            if (child == nodes_[n].left) {
                mine.insert(mine.begin(), theirs.begin(), theirs.end());
            } else {
                mine.insert(mine.end(), theirs.begin(), theirs.end());
            }
            refresh_bounds(n);
            unlink_node(child);
        }
        return;
    }

    if (!is_interior(n)) {
        unlink_node(n);
        return;
    }

    // Empty interior node: pull the greatest lower bound up, even if that
    // empties the donor.
    const NodeId glb = rightmost(nodes_[n].left);
    nodes_[n].items.push_back(nodes_[glb].items.back());
    nodes_[glb].items.pop_back();
    refresh_bounds(n);
    if (nodes_[glb].items.empty()) {
        unlink_node(glb);
    } else {
        refresh_bounds(glb);
    }
    // n may have moved or lost a child during rebalancing; it still exists.
    fill_interior(n);
}

LookupResult TTree::search(Ptn key) const {
    LookupResult result;
    NodeId marked = kNil;
    for (NodeId n = root_; n != kNil;) {
        const Node& node = nodes_[n];
        ++result.stats.nodes_visited;
        ++result.stats.comparisons;
        if (key < node.min_key) {
            n = node.left;
        } else {
            marked = n;
            n = node.right;
        }
    }
    if (marked == kNil) {
        return result;
    }

    ++result.stats.bounding_searches;
    const auto& items = nodes_[marked].items;
    std::size_t lo = 0;
    std::size_t hi = items.size();
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        ++result.stats.comparisons;
        const Ptn k = items[mid].key;
        if (k == key) {
            result.found = true;
            result.payload = items[mid].payload;
            return result;
        }
        if (k < key) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    return result;
}

std::vector<Ptn> TTree::keys() const {
    std::vector<Ptn> out;
    out.reserve(size_);
    std::vector<NodeId> stack;
    NodeId n = root_;
    while (n != kNil || !stack.empty()) {
        while (n != kNil) {
            stack.push_back(n);
            n = nodes_[n].left;
        }
        n = stack.back();
        stack.pop_back();
        for (const auto& item : nodes_[n].items) {
            out.push_back(item.key);
        }
        n = nodes_[n].right;
    }
    return out;
}

std::size_t TTree::underfull_interior_nodes() const {
    std::size_t count = 0;
    std::vector<NodeId> stack;
    if (root_ != kNil) {
        stack.push_back(root_);
    }
    while (!stack.empty()) {
        const NodeId n = stack.back();
        stack.pop_back();
        if (is_interior(n) && nodes_[n].items.size() < static_cast<std::size_t>(min_interior_)) {
            ++count;
        }
        if (nodes_[n].left != kNil) {
            stack.push_back(nodes_[n].left);
        }
        if (nodes_[n].right != kNil) {
            stack.push_back(nodes_[n].right);
        }
    }
    return count;
}

ValidationReport TTree::validate() const {
    ValidationReport report;
    std::size_t counted = 0;
    std::size_t visited_nodes = 0;

    const auto fail = [&report](const std::string& path, std::string message) {
        report.ok = false;
        report.node_path = path;
        report.message = std::move(message);
        return -1;
    };

    // Returns the subtree height, or -1 after recording a violation.
    std::function<int(NodeId, NodeId, const std::string&, std::optional<Ptn>, std::optional<Ptn>)>
        check = [&](NodeId n, NodeId parent, const std::string& path, std::optional<Ptn> lower,
                    std::optional<Ptn> upper) -> int {
        if (n == kNil) {
            return 0;
        }
        if (++visited_nodes > nodes_.size()) {
            return fail(path, "cycle in node links");
        }
        const Node& node = nodes_[n];
        if (node.parent != parent) {
            return fail(path, "parent link mismatch");
        }
        if (node.items.empty()) {
            return fail(path, "empty node");
        }
        if (node.items.size() > static_cast<std::size_t>(max_items_)) {
            return fail(path, "node holds more than " + std::to_string(max_items_) + " items");
        }
        for (std::size_t i = 1; i < node.items.size(); ++i) {
            if (!(node.items[i - 1].key < node.items[i].key)) {
                return fail(path, "items not strictly increasing at position " + std::to_string(i));
            }
        }
        if (node.min_key != node.items.front().key || node.max_key != node.items.back().key) {
            return fail(path, "stale min/max cache");
        }
        if (lower && !(*lower < node.min_key)) {
            return fail(path, "key order violated against an ancestor (left bound)");
        }
        if (upper && !(node.max_key < *upper)) {
            return fail(path, "key order violated against an ancestor (right bound)");
        }
        counted += node.items.size();
        const int hl = check(node.left, n, path + ".L", lower, node.min_key);
        if (hl < 0) {
            return -1;
        }
        const int hr = check(node.right, n, path + ".R", node.max_key, upper);
        if (hr < 0) {
            return -1;
        }
        if (node.height != 1 + std::max(hl, hr)) {
            return fail(path, "stored height is stale");
        }
        if (hl - hr > 1 || hr - hl > 1) {
            return fail(path, "AVL balance violated (left " + std::to_string(hl) + ", right " +
                                  std::to_string(hr) + ")");
        }
        return 1 + std::max(hl, hr);
    };

    if (check(root_, kNil, "root", std::nullopt, std::nullopt) < 0) {
        return report;
    }
    if (counted != size_) {
        report.ok = false;
        report.node_path = "root";
        report.message = "size " + std::to_string(size_) + " != item count " + std::to_string(counted);
    }
    return report;
}

void TTree::clear() {
    nodes_.clear();
    free_.clear();
    root_ = kNil;
    size_ = 0;
}

}  // namespace locdb
