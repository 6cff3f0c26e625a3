#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "locdb/analytic.hpp"
#include "locdb/error.hpp"
#include "oracles.hpp"

using namespace locdb;

namespace {

ServiceTimeEstimate constant_estimate(double mean, std::uint64_t n = 10000) { return {mean, 0.0, n}; }

}  // namespace

TEST_CASE("P-K response time") {
    CHECK(pk_response_time({2.0, 0.3, 0.0}) == 2.0);
    CHECK(pk_response_time({1.0, 0.0, 0.5}) == doctest::Approx(1.5));
    CHECK_THROWS_AS(pk_response_time({1.0, 0.0, 1.0}), SaturationError);
    CHECK_THROWS_AS(pk_response_time({1.0, 0.0, 2.0}), SaturationError);
    CHECK_THROWS_AS(pk_response_time({0.0, 0.0, 1.0}), ConfigError);
    try {
        pk_response_time({1.0, 0.0, 1.25});
    } catch (const SaturationError& e) {
        CHECK(e.utilization() == doctest::Approx(1.25));
    }
}

TEST_CASE("P-K is at least the service time and increases in each argument") {
    const QueueStats base{1.0, 0.5, 0.4};
    const double t = pk_response_time(base);
    CHECK(t >= base.mean_service);
    CHECK(pk_response_time({1.0, 0.5, 0.5}) > t);
    CHECK(pk_response_time({1.1, 0.5, 0.4}) > t);
    CHECK(pk_response_time({1.0, 0.6, 0.4}) > t);
    CHECK(pk_response_time({1.0, 0.0, 0.999999}) > 1e5);
}

TEST_CASE("P-K at DB0 matches an M/G/1 simulation") {
    SystemParams p;
    const WorkloadRates w = workload_rates(p);
    const QueueStats s0 = service_db0_memdirect(p, w);
    const TwoPointService law = direct_service_law(p, w, 0, p.Ts);
    const double sim = oracle::lindley_mean_response(
        s0.arrival_rate, [&](std::mt19937_64& rng) { return law.sample(rng); }, 1000000, 10000, 17);
    CHECK(pk_response_time(s0) == doctest::Approx(sim).epsilon(0.005));
}

TEST_CASE("update delay coefficients") {
    CHECK(update_delay({5, 3, 7}, 0, 0) == doctest::Approx(2 * 7 + 3));
    CHECK(update_delay({1, 1, 1}, 0.05, 0.15) == doctest::Approx(3.45));
    CHECK(update_delay({2, 2, 2}, 0.05, 0.15) == doctest::Approx(2 * 3.45));
    CHECK(update_delay({1, 0, 0}, 0.05, 0.15) == doctest::Approx(2 * 0.05 + 0.15));
    CHECK(update_delay({0, 1, 0}, 0.05, 0.15) == doctest::Approx(1 + 0.05 + 0.15));
    CHECK(update_delay({0, 0, 1}, 0.05, 0.15) == doctest::Approx(2));
}

TEST_CASE("delivery delay coefficients") {
    CHECK(delivery_delay({5, 3, 7}, 0, 0, 0) == doctest::Approx(7));
    CHECK(delivery_delay({1, 1, 1}, 0.01, 0.04, 0.45) == doctest::Approx(2.11));
    CHECK(delivery_delay({1, 0, 0}, 0.01, 0.04, 0.45) == doctest::Approx(2 * 0.01 + 0.04));
    CHECK(delivery_delay({0, 1, 0}, 0.01, 0.04, 0.45) == doctest::Approx(2 * 0.01 + 2 * 0.04 + 0.45));
    CHECK(delivery_delay({0, 0, 1}, 0.01, 0.04, 0.45) == doctest::Approx(1.5));
    const double base = delivery_delay({1, 1, 1}, 0.01, 0.04, 0.45);
    CHECK(delivery_delay({1, 1, 1}, 0.02, 0.04, 0.45) > base);
    CHECK(delivery_delay({1, 1, 1}, 0.01, 0.05, 0.45) > base);
    CHECK(delivery_delay({1, 1, 1}, 0.01, 0.04, 0.46) > base);
}

TEST_CASE("DB0 memory-resident direct file") {
    SystemParams p;
    const WorkloadRates w = workload_rates(p);
    const QueueStats s = service_db0_memdirect(p, w);
    CHECK(s.mean_service == doctest::Approx(oracle::mean_s0({})).epsilon(1e-12));
    CHECK(s.var_service == doctest::Approx(oracle::var_s0({})).epsilon(1e-12));
    CHECK(s.mean_service * 1e6 == doctest::Approx(18.07).epsilon(5e-3));
    CHECK(s.arrival_rate == doctest::Approx(arrival_rates(p, w).lambda0));

    SystemParams half = p;
    half.q1 = half.p1 = 0;
    CHECK(service_db0_memdirect(half, w).mean_service == doctest::Approx(1.5 * p.Ts).epsilon(1e-14));

    SystemParams fixed = p;
    fixed.q0 = fixed.p0 = 0;
    CHECK(service_db0_memdirect(fixed, w).var_service == 0.0);

    SystemParams none = p;
    none.q0 = none.q1 = none.p0 = none.p1 = 0;
    CHECK_THROWS_AS(service_db0_memdirect(none, w), Error);
}

TEST_CASE("DB1 memory-resident direct file") {
    SystemParams p;
    const WorkloadRates w = workload_rates(p);
    const QueueStats s = service_db1_memdirect(p, w);
    CHECK(s.mean_service == p.Ts);
    CHECK(s.var_service == 0.0);
    CHECK(s.arrival_rate == doctest::Approx(arrival_rates(p, w).lambda1));
}

TEST_CASE("DB2 memory-resident direct file") {
    SystemParams p;
    const WorkloadRates w = workload_rates(p);
    const QueueStats s = service_db2_memdirect(p, w);
    CHECK(s.mean_service == doctest::Approx(oracle::mean_s2({})).epsilon(1e-12));
    CHECK(s.var_service == doctest::Approx(oracle::var_s2({})).epsilon(1e-12));
    CHECK(s.mean_service * 1e6 == doctest::Approx(18.52).epsilon(5e-3));

    SystemParams local = p;
    local.p0 = local.p1 = local.p2 = 0;
    const QueueStats l = service_db2_memdirect(local, w);
    CHECK(l.mean_service == doctest::Approx(2 * p.Ts).epsilon(1e-14));
    CHECK(l.var_service == 0.0);

    const QueueStats quiet = service_db2_memdirect(p, {w.lambda_u, 0.0});
    CHECK(quiet.mean_service == doctest::Approx(2 * p.Ts).epsilon(1e-14));
    CHECK(quiet.var_service == 0.0);

    CHECK_THROWS_AS(service_db2_memdirect(p, {0.0, 0.0}), Error);
}

TEST_CASE("two-point laws carry the closed-form moments") {
    SystemParams p;
    const WorkloadRates w = workload_rates(p);
    for (int level = 0; level < 3; ++level) {
        const auto law = direct_service_law(p, w, level, p.Ts);
        const auto stats = level_queue_stats(p, w, level, IndexChoice::MemoryDirect, nullptr);
        CHECK(law.mean() == doctest::Approx(stats.mean_service).epsilon(1e-12));
        CHECK(law.variance() == doctest::Approx(stats.var_service).epsilon(1e-9));
    }
}

TEST_CASE("direct-file service times stay in [Ts, 2Ts]") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 0.3);
    for (int i = 0; i < 500; ++i) {
        SystemParams p;
        p.q0 = u(rng);
        p.q1 = u(rng);
        p.p0 = u(rng);
        p.p1 = u(rng);
        p.p2 = u(rng);
        if (p.q0 + p.q1 + p.p0 + p.p1 == 0) {
            continue;
        }
        const WorkloadRates w = workload_rates(p);
        for (const auto& s : {service_db0_memdirect(p, w), service_db2_memdirect(p, w)}) {
            CHECK(s.mean_service >= p.Ts * (1 - 1e-12));
            CHECK(s.mean_service <= 2 * p.Ts * (1 + 1e-12));
            CHECK(s.var_service >= 0.0);
        }
    }
}

TEST_CASE("T-tree service stats") {
    const QueueStats s = service_ttree(constant_estimate(2e-4), 300.0);
    CHECK(s.mean_service == 2e-4);
    CHECK(s.var_service == 0.0);
    CHECK(s.arrival_rate == 300.0);
    CHECK(pk_response_time(s) == doctest::Approx(2e-4 + 300.0 * 4e-8 / (2 * (1 - 0.06))));
    CHECK_THROWS_AS(service_ttree(constant_estimate(1e-4, 10), 1.0), InsufficientSamplesError);

    SystemParams p;
    const auto est = estimate_ttree_service(p, 10000, 10000, 3);
    const WorkloadRates w = workload_rates(p);
    for (int level = 0; level < 3; ++level) {
        CHECK_NOTHROW(pk_response_time(service_ttree(est, arrival_rates(p, w).at(level))));
    }
}

TEST_CASE("disk-resident direct file") {
    SystemParams p;
    const WorkloadRates w = workload_rates(p);
    const QueueStats d1 = service_diskdirect(p, w, 1);
    CHECK(d1.mean_service == p.Tb);
    CHECK(d1.var_service == 0.0);
    CHECK(d1.arrival_rate == doctest::Approx(arrival_rates(p, w).lambda1));

    const QueueStats d0 = service_diskdirect(p, w, 0);
    CHECK(d0.mean_service * 1e3 == doctest::Approx(36.14).epsilon(5e-3));
    CHECK(d0.utilization() == doctest::Approx(12.7).epsilon(5e-3));
    CHECK_THROWS_AS(pk_response_time(d0), SaturationError);

    SystemParams same = p;
    same.Tb = same.Ts;
    for (int level = 0; level < 3; ++level) {
        const QueueStats a = service_diskdirect(same, w, level);
        const QueueStats b = level_queue_stats(same, w, level, IndexChoice::MemoryDirect, nullptr);
        CHECK(a.mean_service == b.mean_service);
        CHECK(a.var_service == b.var_service);
        CHECK(a.arrival_rate == b.arrival_rate);
    }
}

TEST_CASE("direct-file storage check") {
    SystemParams p;
    p.Phi0_bytes = std::numeric_limits<double>::max();
    CHECK(storage_feasible_direct(p, 1e6, 0));

    SystemParams q;
    CHECK(storage_feasible_direct(q, 1e6, 0));
    CHECK(storage_feasible_direct(q, 1e6, 2));

    SystemParams tight;
    tight.Phi1_bytes = tight.Nt * tight.Ei_bytes;
    tight.Phi2_bytes = tight.Nt * tight.Ei_bytes;
    CHECK(storage_feasible_direct(tight, 1e9, 1));   // no profiles at DB1
    CHECK_FALSE(storage_feasible_direct(tight, 1, 2));

    SystemParams zero;
    zero.Phi0_bytes = zero.Phi1_bytes = zero.Phi2_bytes = 0;
    for (int level = 0; level < 3; ++level) {
        CHECK_FALSE(storage_feasible_direct(zero, 1e6, level));
    }
}

TEST_CASE("T-tree storage check") {
    SystemParams p;
    p.kappa = 1;
    p.Y1 = 1;
    p.Y2 = 1;
    p.a1_bytes = p.a2_bytes = 0;
    p.Phi2_bytes = 1e6 * p.Ei_bytes + 1e3 * p.M_bytes;
    CHECK(storage_feasible_ttree(p, 1e6, 1e3, 2));
    p.Phi2_bytes = std::nextafter(p.Phi2_bytes, 0.0);
    CHECK_FALSE(storage_feasible_ttree(p, 1e6, 1e3, 2));

    SystemParams q;
    const double lhs = 1e6 * (3 * 8 + 2 * 8 + 15 * 8) / (0.95 * 15) + 1e6 * 512;
    CHECK(lhs == doctest::Approx(1.123e7 + 5.12e8).epsilon(1e-3));
    q.Phi2_bytes = lhs;
    CHECK(storage_feasible_ttree(q, 1e6, 1e6, 2));
    q.Phi2_bytes = lhs * (1 - 1e-9);
    CHECK_FALSE(storage_feasible_ttree(q, 1e6, 1e6, 2));

    SystemParams zero;
    zero.Phi0_bytes = zero.Phi1_bytes = zero.Phi2_bytes = 0;
    CHECK_FALSE(storage_feasible_ttree(zero, 1e6, 1e6, 0));
}

TEST_CASE("storage checks agree with direct arithmetic on random points") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        SystemParams p;
        p.Nt = 1e6 + 1e9 * u(rng);
        p.Ei_bytes = 1 + 15 * u(rng);
        p.M_bytes = 2048 * u(rng);
        p.a1_bytes = 16 * u(rng);
        p.a2_bytes = 16 * u(rng);
        p.Y1 = 1 + static_cast<int>(30 * u(rng));
        p.Y2 = 1;
        p.kappa = 0.05 + 0.95 * u(rng);
        p.Phi0_bytes = p.Phi1_bytes = p.Phi2_bytes = 3e10 * u(rng);
        const double Ni = 1e7 * u(rng);
        const double Nie = 1e9 * u(rng);
        for (int level = 0; level < 3; ++level) {
            CHECK(storage_feasible_direct(p, Ni, level) ==
                  oracle::direct_fits(p.Nt, p.Ei_bytes, Ni, p.M_bytes, p.phi(level), level));
            CHECK(storage_feasible_ttree(p, Nie, Ni, level) ==
                  oracle::ttree_fits(Nie, p.a1_bytes, p.a2_bytes, p.Y1, p.Ei_bytes, p.kappa, Ni, p.M_bytes,
                                     p.phi(level), level));
        }
    }
}

TEST_CASE("index selection") {
    SystemParams p;
    const auto est = estimate_ttree_service(p, 10000, 5000, 1);
    CHECK(select_index(0, p, default_selection_inputs(p, 0, est)) == IndexChoice::MemoryDirect);

    SystemParams small = p;
    small.Phi2_bytes = 1e8;
    const auto in2 = default_selection_inputs(small, 2, est);
    REQUIRE_FALSE(storage_feasible_direct(small, in2.residing, 2));
    REQUIRE(storage_feasible_ttree(small, in2.ttree_entries, in2.residing, 2));
    CHECK(select_index(2, small, in2) == IndexChoice::TTreeIndex);

    SystemParams none = p;
    none.Phi0_bytes = none.Phi1_bytes = none.Phi2_bytes = 0;
    for (int level = 0; level < 3; ++level) {
        CHECK_THROWS_AS(select_index(level, none, default_selection_inputs(none, level, est)),
                        NoFeasibleChoiceError);
    }

    // Equal response times resolve to the memory-resident file.
    SystemParams tie = p;
    tie.Tb = tie.Ts;
    CHECK(select_index(1, tie, {1.0, 1.0, constant_estimate(tie.Ts)}) == IndexChoice::MemoryDirect);
}

TEST_CASE("response curves") {
    SystemParams p;
    const double one[] = {415.0};
    const auto single = response_curves(p, one, IndexChoice::MemoryDirect, 0);
    REQUIRE(single.size() == 1);
    CHECK(single[0].response.value() == pk_response_time(service_db0_memdirect(p, workload_rates(p))));

    std::vector<double> sweep;
    for (double rho = 50; rho <= 2000; rho += 50) {
        sweep.push_back(rho);
    }
    const auto est = estimate_ttree_service(p, 10000, 5000, 1);
    for (IndexChoice c : {IndexChoice::MemoryDirect, IndexChoice::TTreeIndex, IndexChoice::DiskDirect}) {
        for (int level = 0; level < 3; ++level) {
            const auto curve = response_curves(p, sweep, c, level, &est);
            double last = 0.0;
            bool saturated = false;
            for (const auto& pt : curve) {
                if (pt.saturated()) {
                    saturated = true;
                    continue;
                }
                CHECK_FALSE(saturated);
                CHECK(*pt.response >= last);
                last = *pt.response;
            }
        }
    }
    const auto disk0 = response_curves(p, sweep, IndexChoice::DiskDirect, 0);
    CHECK(std::any_of(disk0.begin(), disk0.end(), [](const CurvePoint& c) { return c.saturated(); }));
    const auto mem0 = response_curves(p, sweep, IndexChoice::MemoryDirect, 0);
    CHECK(std::none_of(mem0.begin(), mem0.end(), [](const CurvePoint& c) { return c.saturated(); }));

    CHECK_THROWS_AS(response_curves(p, std::span<const double>{}, IndexChoice::MemoryDirect, 0), ConfigError);
    CHECK_THROWS_AS(response_curves(p, one, IndexChoice::TTreeIndex, 0), ConfigError);
}

TEST_CASE("index names") {
    for (IndexChoice c : {IndexChoice::MemoryDirect, IndexChoice::TTreeIndex, IndexChoice::DiskDirect}) {
        CHECK(parse_index_choice(to_string(c)) == c);
    }
    CHECK_THROWS_AS(parse_index_choice("btree"), ConfigError);
}
