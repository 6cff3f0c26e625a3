#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "locdb/analytic.hpp"
#include "locdb/cli.hpp"
#include "locdb/desim.hpp"
#include "locdb/error.hpp"
#include "locdb/index/ttree.hpp"
#include "locdb/params.hpp"

namespace py = pybind11;
using namespace locdb;

namespace {

py::tuple run_cli_py(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"locdb"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    int code = 0;
    {
        py::gil_scoped_release release;
        code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
}

py::dict report_dict(const SystemParams& p) {
    const ReportValues r = report_values(p);
    py::dict d;
    d["lambda_u"] = r.workload.lambda_u;
    d["lambda_c"] = r.workload.lambda_c;
    d["lambda_0"] = r.rates.lambda0;
    d["lambda_1"] = r.rates.lambda1;
    d["lambda_2"] = r.rates.lambda2;
    d["E_S0"] = r.db0.mean_service;
    d["Var_S0"] = r.db0.var_service;
    d["E_S1"] = r.db1.mean_service;
    d["Var_S1"] = r.db1.var_service;
    d["E_S2"] = r.db2.mean_service;
    d["Var_S2"] = r.db2.var_service;
    if (r.delays) {
        d["T0"] = r.delays->T0;
        d["T1"] = r.delays->T1;
        d["T2"] = r.delays->T2;
    }
    d["T_u"] = r.T_u ? py::cast(*r.T_u) : py::none();
    d["T_d"] = r.T_d ? py::cast(*r.T_d) : py::none();
    return d;
}

}  // namespace

PYBIND11_MODULE(_locdb, m) {
    m.doc() = "Location database performance models";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<SaturationError>(m, "SaturationError", base.ptr());
    py::register_exception<DuplicateKeyError>(m, "DuplicateKeyError", base.ptr());
    py::register_exception<KeyNotFoundError>(m, "KeyNotFoundError", base.ptr());
    py::register_exception<ProtocolError>(m, "ProtocolError", base.ptr());
    py::register_exception<SimulationError>(m, "SimulationError", base.ptr());

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init<>())
        .def_readwrite("n0", &SystemParams::n0)
        .def_readwrite("n1", &SystemParams::n1)
        .def_readwrite("r1", &SystemParams::r1)
        .def_readwrite("r2", &SystemParams::r2)
        .def_readwrite("v1_kmh", &SystemParams::v1_kmh)
        .def_readwrite("v2_kmh", &SystemParams::v2_kmh)
        .def_readwrite("L_km", &SystemParams::L_km)
        .def_readwrite("A_km2", &SystemParams::A_km2)
        .def_readwrite("xi_per_hr", &SystemParams::xi_per_hr)
        .def_readwrite("rho", &SystemParams::rho)
        .def_readwrite("q0", &SystemParams::q0)
        .def_readwrite("q1", &SystemParams::q1)
        .def_readwrite("p0", &SystemParams::p0)
        .def_readwrite("p1", &SystemParams::p1)
        .def_readwrite("p2", &SystemParams::p2)
        .def_readwrite("Ts", &SystemParams::Ts)
        .def_readwrite("Tb", &SystemParams::Tb)
        .def_readwrite("Tc", &SystemParams::Tc)
        .def_readwrite("Nt", &SystemParams::Nt)
        .def("validate", &SystemParams::validate)
        .def("to_config", [](const SystemParams& p) { return to_config_string(p); })
        .def_static("from_config", [](const std::string& text) {
            std::istringstream in(text);
            return parse_config(in);
        })
        .def("__eq__", [](const SystemParams& a, const SystemParams& b) { return a == b; });

    m.def("load_config", [](const std::string& path) { return load_config(path); }, py::arg("path"));

    m.def("workload_rates", [](const SystemParams& p) {
        const auto w = workload_rates(p);
        return py::make_tuple(w.lambda_u, w.lambda_c);
    }, "(lambda_u, lambda_c) per second");
    m.def("arrival_rates", [](const SystemParams& p) {
        const auto r = arrival_rates(p, workload_rates(p));
        return py::make_tuple(r.lambda0, r.lambda1, r.lambda2);
    }, "(lambda0, lambda1, lambda2) per database instance");

    m.def("pk_response_time", [](double mean, double var, double rate) {
        return pk_response_time(QueueStats{mean, var, rate});
    }, py::arg("mean_service"), py::arg("var_service"), py::arg("arrival_rate"));

    m.def("report", &report_dict, py::arg("params") = SystemParams{},
          "Rates, memory-resident service moments and delays, in seconds");

    m.def("simulate", [](const SystemParams& p, double horizon_s, std::uint64_t seed) {
        SimConfig cfg;
        cfg.horizon_s = horizon_s;
        cfg.seed = seed;
        SimMetrics s;
        {
            py::gil_scoped_release release;
            s = run_simulation(p, cfg);
        }
        py::dict d;
        d["T"] = py::make_tuple(s.levels[0].mean_response, s.levels[1].mean_response, s.levels[2].mean_response);
        d["rates"] = py::make_tuple(s.levels[0].rate_per_node, s.levels[1].rate_per_node, s.levels[2].rate_per_node);
        d["T_u"] = s.T_u;
        d["T_d"] = s.T_d;
        d["events"] = s.events_generated;
        return d;
    }, py::arg("params") = SystemParams{}, py::arg("horizon_s") = 500.0, py::arg("seed") = 1);

    py::class_<TTree>(m, "TTree")
        .def(py::init<int, int>(), py::arg("max_items") = 15, py::arg("min_interior") = 8)
        .def("insert", &TTree::insert, py::arg("key"), py::arg("payload"))
        .def("erase", &TTree::erase, py::arg("key"))
        .def("get", [](const TTree& t, Ptn key) -> py::object {
            const auto r = t.search(key);
            return r.found ? py::cast(*r.payload) : py::none();
        })
        .def("__contains__", &TTree::contains)
        .def("__len__", &TTree::size)
        .def("keys", &TTree::keys)
        .def_property_readonly("height", &TTree::height)
        .def("validate", [](const TTree& t) {
            const auto r = t.validate();
            return py::make_tuple(r.ok, r.node_path, r.message);
        });

    m.def("run_cli", &run_cli_py, py::arg("args"), "Runs the command line tool; returns (code, stdout, stderr)");
}
