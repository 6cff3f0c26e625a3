#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "locdb/cli.hpp"
#include "locdb/error.hpp"

using namespace locdb;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "locdb");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

CsvTable parse(const std::string& text) {
    std::istringstream in(text);
    return read_csv(in);
}

}  // namespace

TEST_CASE("usage") {
    const Run none = cli({});
    CHECK(none.code == kExitUsage);
    CHECK(none.err.find("Usage") != std::string::npos);
    CHECK(cli({"frobnicate"}).code == kExitUsage);
    CHECK(cli({"report", "--bogus"}).code == kExitUsage);
    CHECK(cli({"--help"}).code == kExitOk);
    CHECK(cli({"report", "--config", "/nonexistent.cfg"}).code == kExitUsage);
    CHECK(cli({"analyze", "--sweep", "rho=1:2"}).code == kExitUsage);
    CHECK(cli({"analyze", "--sweep", "xi=1:2:1"}).code == kExitUsage);
    CHECK(cli({"analyze", "--index", "btree"}).code == kExitUsage);
    CHECK(cli({"overlap-scenario"}).code == kExitUsage);
}

TEST_CASE("model errors exit with 2") {
    const auto cfg = temp_path("locdb_bad.cfg");
    std::ofstream(cfg) << "q0 = 1.5\n";
    const Run r = cli({"report", "--config", cfg.string()});
    CHECK(r.code == kExitModel);
    CHECK(r.err.find("q0") != std::string::npos);
    CHECK(cli({"simulate", "--horizon", "1"}).code == kExitModel);
    CHECK(cli({"report", "--output", "/nonexistent-dir/x.csv"}).code == kExitModel);
}

TEST_CASE("report agrees with the library to the printed digits") {
    const Run r = cli({"report"});
    REQUIRE(r.code == 0);
    for (const char* v : {"8.717", "9.264", "350.1", "248.9", "31.33", "18.07", "18.52"}) {
        CHECK(r.out.find(v) != std::string::npos);
    }

    const Run csv = cli({"report", "--csv"});
    const CsvTable t = parse(csv.out);
    const ReportValues v = report_values(SystemParams{});
    REQUIRE(t.rows.size() >= 7);
    CHECK(std::stod(t.rows[0][1]) == v.workload.lambda_u);
    CHECK(std::stod(t.rows[2][1]) == v.rates.lambda0);
    CHECK(std::stod(t.rows[5][1]) == v.db0.mean_service * 1e6);
}

TEST_CASE("analyze output") {
    const Run r = cli({"analyze", "--level", "0", "--index", "disk-direct", "--sweep", "rho=50:2000:50"});
    REQUIRE(r.code == 0);
    const CsvTable t = parse(r.out);
    CHECK(t.header == split_csv_line(kAnalyzeHeader));
    CHECK(t.rows.size() == 40);
    CHECK(t.rows.front()[0] == "50");
    CHECK(t.rows.back()[0] == "2000");
    CHECK(r.out.find("SATURATED") != std::string::npos);

    const Run one = cli({"analyze", "--level", "1", "--index", "memory-direct"});
    const CsvTable o = parse(one.out);
    REQUIRE(o.rows.size() == 1);
    CHECK(o.rows[0][1] == "1");
    CHECK(o.rows[0][2] == "memory-direct");
    CHECK(std::stod(o.rows[0][4]) == doctest::Approx(10.0));
}

TEST_CASE("output file and determinism") {
    const auto a = temp_path("locdb_a.csv");
    const auto b = temp_path("locdb_b.csv");
    REQUIRE(cli({"--seed", "9", "--output", a.string(), "bench-index", "--keys", "2000", "--probes", "2000"}).code == 0);
    REQUIRE(cli({"bench-index", "--seed", "9", "--output", b.string(), "--keys", "2000", "--probes", "2000"}).code == 0);
    std::ifstream fa(a), fb(b);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
    const CsvTable t = parse(sa.str());
    CHECK(t.header == split_csv_line(kBenchHeader));
    CHECK(t.rows.size() == 3);
    CHECK(std::stod(t.rows[0][3]) == doctest::Approx(10.0));
}

TEST_CASE("simulate output") {
    const Run r = cli({"simulate", "--horizon", "30"});
    REQUIRE(r.code == 0);
    const CsvTable t = parse(r.out);
    CHECK(t.header == split_csv_line(kSimulateHeader));
    CHECK(t.rows.size() == 3);

    const Run sat = cli({"simulate", "--index", "disk-direct", "--horizon", "30"});
    REQUIRE(sat.code == 0);
    CHECK(parse(sat.out).rows[0][7] == "SATURATED");
}

TEST_CASE("overlap scenario output") {
    const Run r = cli({"overlap-scenario", "--scenario", "b", "--in-call"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind(std::string(kTraceHeader), 0) == 0);
    CHECK(r.out.find(",DB0,2,register,") != std::string::npos);

    const auto wp = temp_path("locdb_walk.txt");
    std::ofstream(wp) << "0,10,56,1,0\n30,20,56,1,1\n90,30,56,1,1\n";
    const Run f = cli({"overlap-scenario", "--scenario", "a", "--waypoints", wp.string()});
    REQUIRE(f.code == 0);
    CHECK(f.out.find("DB0") == std::string::npos);

    std::ofstream(wp) << "0,10,56,1,0\n";
    CHECK(cli({"overlap-scenario", "--scenario", "a", "--waypoints", wp.string()}).code == kExitModel);
}

TEST_CASE("csv helpers") {
    CsvTable t;
    t.header = {"a", "b"};
    std::ostringstream empty;
    write_csv(empty, t);
    CHECK(empty.str() == "a,b\n");

    t.rows = {{format_full(0.1), format_full(1.0 / 3.0)}, {"x", std::string(kSaturated)}};
    std::ostringstream out;
    write_csv(out, t);
    const CsvTable back = parse(out.str());
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
    CHECK(std::stod(back.rows[0][1]) == 1.0 / 3.0);

    t.rows.push_back({"only one"});
    std::ostringstream bad;
    CHECK_THROWS_AS(write_csv(bad, t), ConfigError);

    CHECK(format_sig(350.0812736) == "350.1");
    CHECK(format_sig(18.0677) == "18.07");
}

TEST_CASE("sweep syntax") {
    const Sweep s = parse_sweep("rho=50:2000:50");
    CHECK(s.name == "rho");
    const auto v = s.values();
    CHECK(v.size() == 40);
    CHECK(v.back() == 2000);
    CHECK(parse_sweep("rho=0.1:0.3:0.1").values().size() == 3);
    CHECK(parse_sweep("rho=5:5:1").values() == std::vector<double>{5});
    CHECK_THROWS_AS(parse_sweep("rho=1:2"), ConfigError);
    CHECK_THROWS_AS(parse_sweep("rho=1:2:0"), ConfigError);
    CHECK_THROWS_AS(parse_sweep("rho=3:2:1"), ConfigError);
    CHECK_THROWS_AS(parse_sweep("=1:2:1"), ConfigError);
    CHECK_THROWS_AS(parse_sweep("rho=a:2:1"), ConfigError);
}
