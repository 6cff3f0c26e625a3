#include <doctest.h>

#include <map>
#include <random>

#include "locdb/error.hpp"
#include "locdb/index/direct_file.hpp"

using namespace locdb;

TEST_CASE("direct file put and get") {
    DirectFile f(1000, 16);
    const auto put = f.put(1003, 77);
    CHECK(put.slot_accesses == 1);
    const auto r = f.get(1003);
    CHECK(r.found);
    CHECK(r.payload == 77u);
    CHECK(r.stats.slot_accesses == 1);
    CHECK(r.stats.nodes_visited == 0);
}

TEST_CASE("never-written slot") {
    DirectFile f(0, 8);
    const auto r = f.get(5);
    CHECK_FALSE(r.found);
    CHECK(r.stats.slot_accesses == 1);
}

TEST_CASE("out of range keys") {
    DirectFile f(100, 10, Residency::Disk);
    CHECK_THROWS_AS(f.put(99, 1), KeyRangeError);
    CHECK_THROWS_AS(f.get(110), KeyRangeError);
    CHECK_THROWS_AS(f.erase(200), KeyRangeError);
    CHECK_NOTHROW(f.put(109, 1));
    CHECK(f.residency() == Residency::Disk);
}

TEST_CASE("random interleaving over every slot matches a map") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<Ptn> key(0, 255);
    std::uniform_int_distribution<int> op(0, 2);
    DirectFile f(0, 256);
    std::map<Ptn, Payload> oracle;
    for (int i = 0; i < 20000; ++i) {
        const Ptn k = key(rng);
        AccessStats s;
        switch (op(rng)) {
            case 0:
                s = f.put(k, i);
                oracle[k] = i;
                break;
            case 1:
                s = f.erase(k);
                oracle.erase(k);
                break;
            default: {
                const auto r = f.get(k);
                s = r.stats;
                const auto it = oracle.find(k);
                REQUIRE(r.found == (it != oracle.end()));
                if (r.found) {
                    REQUIRE(*r.payload == it->second);
                }
            }
        }
        REQUIRE(s.slot_accesses == 1);
        REQUIRE(f.occupied() == oracle.size());
    }
    for (Ptn k = 0; k < 256; ++k) {
        CHECK(f.get(k).found == oracle.contains(k));
    }
}
