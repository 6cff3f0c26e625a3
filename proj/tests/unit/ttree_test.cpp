#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "locdb/error.hpp"
#include "locdb/index/ttree.hpp"

#include "ttree_inspector.hpp"

using namespace locdb;

namespace {

double avl_bound(std::size_t nodes) { return 1.44 * std::log2(static_cast<double>(nodes) + 1.0) + 1.0; }

void check_tree(const TTree& t) {
    const auto report = t.validate();
    INFO(report.node_path << ": " << report.message);
    REQUIRE(report.ok);
    CHECK(static_cast<double>(t.height()) <= avl_bound(t.node_count()));
}

}  // namespace

TEST_CASE("insert into empty tree") {
    TTree t(15, 8);
    CHECK(t.validate().ok);
    t.insert(5, 50);
    CHECK(t.size() == 1);
    CHECK(t.node_count() == 1);
    CHECK(t.height() == 1);
    CHECK(t.keys() == std::vector<Ptn>{5});
}

TEST_CASE("ascending inserts stay sorted and balanced") {
    TTree t(15, 8);
    std::vector<Ptn> expect;
    for (Ptn k = 1; k <= 100; ++k) {
        t.insert(k, k * 10);
        expect.push_back(k);
        check_tree(t);
    }
    CHECK(t.keys() == expect);
}

TEST_CASE("duplicate insert leaves the tree unchanged") {
    TTree t(4, 2);
    for (Ptn k : {8, 3, 12, 1, 9, 15, 4}) {
        t.insert(k, k);
    }
    const auto before = t.keys();
    CHECK_THROWS_AS(t.insert(9, 99), DuplicateKeyError);
    CHECK(t.keys() == before);
    CHECK(t.search(9).payload == 9u);
    check_tree(t);
}

TEST_CASE("delete") {
    SUBCASE("only key") {
        TTree t;
        t.insert(7, 1);
        t.erase(7);
        CHECK(t.empty());
        CHECK(t.node_count() == 0);
        CHECK(t.validate().ok);
    }
    SUBCASE("evens out of 1..1000") {
        TTree t(15, 8);
        std::set<Ptn> oracle;
        for (Ptn k = 1; k <= 1000; ++k) {
            t.insert(k, k);
            oracle.insert(k);
        }
        for (Ptn k = 2; k <= 1000; k += 2) {
            t.erase(k);
            oracle.erase(k);
            check_tree(t);
        }
        CHECK(t.keys() == std::vector<Ptn>(oracle.begin(), oracle.end()));
    }
    SUBCASE("absent key") {
        TTree t;
        for (Ptn k = 0; k < 50; ++k) {
            t.insert(k * 2, k);
        }
        const auto before = t.keys();
        CHECK_THROWS_AS(t.erase(31), KeyNotFoundError);
        CHECK(t.keys() == before);
        check_tree(t);
    }
}

TEST_CASE("search") {
    SUBCASE("empty tree") {
        TTree t;
        const auto r = t.search(1);
        CHECK_FALSE(r.found);
        CHECK_FALSE(r.payload.has_value());
        CHECK(r.stats.nodes_visited == 0);
    }
    SUBCASE("single node") {
        TTree t;
        t.insert(10, 100);
        t.insert(20, 200);
        t.insert(30, 300);
        const auto r = t.search(20);
        CHECK(r.found);
        CHECK(r.payload == 200u);
        CHECK(r.stats.nodes_visited == 1);
        CHECK(r.stats.bounding_searches == 1);
        CHECK_FALSE(t.search(25).found);
        CHECK_FALSE(t.search(5).found);
    }
    SUBCASE("random keys against membership oracle") {
        std::mt19937_64 rng(11);
        std::uniform_int_distribution<Ptn> key(0, 19999);
        TTree t(15, 8);
        std::set<Ptn> oracle;
        while (oracle.size() < 10000) {
            const Ptn k = key(rng);
            if (oracle.insert(k).second) {
                t.insert(k, k ^ 0xabcdefULL);
            }
        }
        check_tree(t);
        for (int i = 0; i < 10000; ++i) {
            const Ptn k = key(rng);
            const auto r = t.search(k);
            REQUIRE(r.found == oracle.contains(k));
            if (r.found) {
                CHECK(*r.payload == (k ^ 0xabcdefULL));
            }
            CHECK(r.stats.nodes_visited <= static_cast<std::uint64_t>(t.height()));
        }
    }
}

TEST_CASE("search descends by the marked-node rule") {
    // Nodes of capacity 2: every probe visits a root-to-leaf path and ends
    // with one binary search of the last node whose minimum is <= key.
    TTree t(2, 1);
    for (Ptn k = 1; k <= 40; ++k) {
        t.insert(k * 10, k);
    }
    for (Ptn probe = 0; probe <= 420; ++probe) {
        const auto r = t.search(probe);
        CHECK(r.found == (probe % 10 == 0 && probe >= 10 && probe <= 400));
        CHECK(r.stats.nodes_visited >= 1);
        CHECK(r.stats.bounding_searches == (probe >= 10 ? 1u : 0u));
    }
}

TEST_CASE("validation reports the corrupted node") {
    SUBCASE("empty") { CHECK(TTree{}.validate().ok); }
    SUBCASE("item order") {
        TTree t(15, 8);
        for (Ptn k = 1; k <= 5; ++k) {
            t.insert(k, k);
        }
        TTreeInspector::swap_root_items(t);
        const auto r = t.validate();
        CHECK_FALSE(r.ok);
        CHECK(r.node_path == "root");
    }
    SUBCASE("subtree bound") {
        TTree t(2, 1);
        for (Ptn k = 1; k <= 10; ++k) {
            t.insert(k, k);
        }
        REQUIRE(t.validate().ok);
        TTreeInspector::break_left_child_order(t);
        const auto r = t.validate();
        CHECK_FALSE(r.ok);
        CHECK(r.node_path.rfind("root.L", 0) == 0);
    }
}

TEST_CASE("randomized operations match a sorted map") {
    for (int y1 : {1, 2, 3, 15}) {
        CAPTURE(y1);
        std::mt19937_64 rng(1000 + y1);
        std::uniform_int_distribution<Ptn> key(0, 3000);
        std::uniform_int_distribution<int> op(0, 2);
        TTree t(y1, (y1 + 1) / 2);
        std::map<Ptn, Payload> oracle;
        for (int i = 0; i < 20000; ++i) {
            const Ptn k = key(rng);
            switch (op(rng)) {
                case 0:
                    if (oracle.contains(k)) {
                        CHECK_THROWS_AS(t.insert(k, i), DuplicateKeyError);
                    } else {
                        t.insert(k, i);
                        oracle[k] = i;
                    }
                    break;
                case 1:
                    if (oracle.contains(k)) {
                        t.erase(k);
                        oracle.erase(k);
                    } else {
                        CHECK_THROWS_AS(t.erase(k), KeyNotFoundError);
                    }
                    break;
                default: {
                    const auto r = t.search(k);
                    const auto it = oracle.find(k);
                    REQUIRE(r.found == (it != oracle.end()));
                    if (r.found) {
                        REQUIRE(*r.payload == it->second);
                    }
                }
            }
            REQUIRE(t.size() == oracle.size());
            if (i % 64 == 0) {
                check_tree(t);
            }
        }
        check_tree(t);
        std::vector<Ptn> keys;
        for (const auto& [k, v] : oracle) {
            keys.push_back(k);
        }
        CHECK(t.keys() == keys);
    }
}

TEST_CASE("clear") {
    TTree t;
    for (Ptn k = 0; k < 100; ++k) {
        t.insert(k, k);
    }
    t.clear();
    CHECK(t.empty());
    CHECK(t.validate().ok);
    t.insert(3, 3);
    CHECK(t.contains(3));
}
