#include <doctest.h>

#include <random>

#include "locdb/error.hpp"
#include "locdb/index/service_time.hpp"

#include "ttree_inspector.hpp"

using namespace locdb;

TEST_CASE("summary statistics") {
    const std::vector<double> xs{1, 2, 3, 4};
    const auto e = summarize(xs);
    CHECK(e.mean == doctest::Approx(2.5));
    CHECK(e.variance == doctest::Approx(5.0 / 3.0));
    CHECK(e.sample_count == 4);
    CHECK(summarize(std::vector<double>{7}).variance == 0.0);
    CHECK_THROWS_AS(summarize(std::vector<double>{}), InsufficientSamplesError);
}

TEST_CASE("direct file costs one access per probe") {
    SystemParams p;
    DirectFile f(0, 1000);
    for (Ptn k = 0; k < 1000; k += 3) {
        f.put(k, k);
    }
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<Ptn> key(0, 999);
    std::vector<Ptn> probes(5000);
    for (auto& k : probes) {
        k = key(rng);
    }
    const auto mem = measure_service_time(f, probes, CostModel::direct_file(p, Residency::Memory));
    CHECK(mem.mean == doctest::Approx(p.Ts).epsilon(1e-12));
    CHECK(mem.variance == doctest::Approx(0.0).epsilon(1e-30));
    const auto disk = measure_service_time(f, probes, CostModel::direct_file(p, Residency::Disk));
    CHECK(disk.mean == doctest::Approx(p.Tb).epsilon(1e-12));
    CHECK_THROWS_AS(measure_service_time(f, std::vector<Ptn>{}, CostModel{}), InsufficientSamplesError);
}

TEST_CASE("single-node tree has constant cost") {
    SystemParams p;
    TTree t(15, 8);
    for (Ptn k = 0; k < 15; ++k) {
        t.insert(k, k);
    }
    REQUIRE(t.node_count() == 1);
    std::vector<Ptn> probes(100, 7);
    const auto est = measure_service_time(t, probes, CostModel::ttree(p));
    CHECK(est.variance == 0.0);
}

TEST_CASE("cost recount by an independent walk") {
    SystemParams p;
    const auto w = make_uniform_ttree_workload(p, 10000, 10000, 21);
    REQUIRE(w.tree.size() == 10000);

    double nodes = 0, probes = 0, bounded = 0;
    for (Ptn k : w.probes) {
        const auto walk = TTreeInspector::walk(w.tree, k);
        CHECK(walk.found == w.tree.contains(k));
        nodes += static_cast<double>(walk.nodes);
        probes += static_cast<double>(walk.probes);
        bounded += walk.nodes > 0 && (walk.probes > 0) ? 1.0 : 0.0;
    }
    const double n = static_cast<double>(w.probes.size());
    const double avg_nodes = nodes / n;
    const double avg_cmp = (nodes + probes) / n;

    const auto literal = measure_service_time(w.tree, w.probes, CostModel::ttree_per_comparison(p));
    CHECK(literal.mean == doctest::Approx(p.Tc * (p.c1 * avg_nodes + p.c2 * avg_cmp)).epsilon(1e-9));

    const auto dflt = measure_service_time(w.tree, w.probes, CostModel::ttree(p));
    CHECK(dflt.mean == doctest::Approx(p.Tc * (p.c1 * avg_nodes + p.c2 * bounded / n + avg_cmp)).epsilon(1e-9));
}

TEST_CASE("estimates from disjoint workloads agree") {
    SystemParams p;
    auto w = make_uniform_ttree_workload(p, 20000, 100000, 8);
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<Ptn> key(0, 39999);
    std::vector<Ptn> other(100000);
    for (auto& k : other) {
        k = key(rng);
    }
    const auto a = measure_service_time(w.tree, w.probes, CostModel::ttree(p));
    const auto b = measure_service_time(w.tree, other, CostModel::ttree(p));
    CHECK(a.mean == doctest::Approx(b.mean).epsilon(0.02));
    CHECK(a.sample_count == 100000);
}

TEST_CASE("workload generation is reproducible") {
    SystemParams p;
    const auto a = make_uniform_ttree_workload(p, 500, 50, 4);
    const auto b = make_uniform_ttree_workload(p, 500, 50, 4);
    CHECK(a.tree.keys() == b.tree.keys());
    CHECK(a.probes == b.probes);
}
