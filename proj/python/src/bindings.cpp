#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "flowrecom/analysis.hpp"
#include "flowrecom/artifacts.hpp"
#include "flowrecom/chain.hpp"
#include "flowrecom/commands.hpp"
#include "flowrecom/error.hpp"
#include "flowrecom/metrics.hpp"

namespace py = pybind11;
using namespace flowrecom;

namespace {

py::object to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json from_py(const py::handle& obj) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

ChainConfig chain_config(const Partition& initial, const std::string& method, std::size_t steps,
                         std::uint64_t seed, double bias, double epsilon, double multiplier,
                         std::size_t max_tree_retries, std::size_t record_assignments_every) {
  ChainConfig c;
  c.proposal.method = parse_method(method);
  c.proposal.bias = bias;
  c.proposal.epsilon = epsilon;
  c.proposal.max_tree_retries = max_tree_retries;
  c.steps = steps;
  c.seed = seed;
  c.compactness_multiplier = multiplier;
  c.record_assignments_every = record_assignments_every;
  c.initial_plan = initial;
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "ReCom ensembles with flow-aware spanning trees and cuts";
  m.attr("__version__") = kEngineVersion;

  static PyObject* error_type = py::exception<Error>(m, "FlowrecomError", PyExc_RuntimeError).release().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error_type)(e.what());
      inst.attr("code") = std::string(errc_name(e.code()));
      inst.attr("detail") = e.detail();
      PyErr_SetObject(error_type, inst.ptr());
    }
  });

  py::class_<FlowMatrix>(m, "FlowMatrix")
      .def(py::init<>())
      .def("add", &FlowMatrix::add, py::arg("origin"), py::arg("destination"), py::arg("flow"))
      .def("at", &FlowMatrix::at)
      .def_property_readonly("total_flow", &FlowMatrix::total_flow)
      .def("entries", [](const FlowMatrix& f) { return f.entries(); })
      .def("__len__", &FlowMatrix::size);

  py::class_<UnitNode>(m, "UnitNode")
      .def(py::init([](std::string id, long long population, long long voting_age_pop, double votes_dem,
                       double votes_rep, double area, double perimeter) {
             return UnitNode{std::move(id), population, voting_age_pop, votes_dem, votes_rep, area, perimeter};
           }),
           py::arg("id"), py::arg("population"), py::arg("voting_age_pop"), py::arg("votes_dem"),
           py::arg("votes_rep"), py::arg("area"), py::arg("perimeter"))
      .def_readwrite("id", &UnitNode::id)
      .def_readwrite("population", &UnitNode::population)
      .def_readwrite("votes_dem", &UnitNode::votes_dem)
      .def_readwrite("votes_rep", &UnitNode::votes_rep);

  py::class_<UnitGraph>(m, "UnitGraph")
      .def_property_readonly("node_count", &UnitGraph::node_count)
      .def_property_readonly("edge_count", &UnitGraph::edge_count)
      .def_property_readonly("total_flow", &UnitGraph::total_flow)
      .def_property_readonly("total_population", &UnitGraph::total_population)
      .def("node_ids", [](const UnitGraph& g) {
        std::vector<std::string> ids;
        for (const auto& n : g.nodes()) ids.push_back(n.id);
        return ids;
      })
      .def("edges", [](const UnitGraph& g) {
        std::vector<py::tuple> out;
        for (const auto& e : g.edges()) {
          out.push_back(py::make_tuple(g.node(e.u).id, g.node(e.v).id, e.shared_perimeter, e.flow_weight));
        }
        return out;
      })
      .def_property_readonly("fingerprint", [](const UnitGraph& g) { return dataset_fingerprint(g); });

  m.def(
      "build_graph",
      [](std::vector<UnitNode> nodes, const std::vector<std::tuple<std::string, std::string, double>>& edges,
         const FlowMatrix& flows) {
        std::vector<EdgeInput> in;
        for (const auto& [u, v, p] : edges) in.push_back({u, v, p});
        return build_graph(std::move(nodes), in, flows);
      },
      py::arg("nodes"), py::arg("edges"), py::arg("flows"),
      "edges are (u, v, shared_perimeter) tuples");
  m.def("load_dataset", [](const fs::path& dir) { return load_dataset(dir).graph; }, py::arg("artifacts"));

  py::class_<Partition>(m, "Partition")
      .def_static("from_assignment", &Partition::from_assignment, py::arg("graph"), py::arg("labels"))
      .def_static("from_map", &Partition::from_map, py::arg("graph"), py::arg("labels"))
      .def_property_readonly("district_count", &Partition::district_count)
      .def_property_readonly("assignment", [](const Partition& p) {
        return std::vector<DistrictId>(p.assignment().begin(), p.assignment().end());
      })
      .def_property_readonly("intra_flow_sum", &Partition::intra_flow_sum)
      .def_property_readonly("inter_flow_sum", &Partition::inter_flow_sum)
      .def("population", [](const Partition& p, DistrictId d) { return p.district(d).population; });

  m.def("contiguous", &contiguous, py::arg("partition"), py::arg("graph"));
  m.def("cut_edge_count", &cut_edge_count, py::arg("partition"));
  m.def("district_geometry", [](const Partition& p, DistrictId d) {
    const auto g = district_geometry(p, d);
    return py::make_tuple(g.area, g.perimeter);
  });

  m.def("interaction_ratio", [](const Partition& p, const UnitGraph& g) {
    const auto r = interaction_ratio(p, g);
    return py::make_tuple(r.ir, r.intra, r.inter);
  }, py::arg("partition"), py::arg("graph"), "returns (ir, intra, inter)");
  m.def("polsby_popper", &polsby_popper, py::arg("area"), py::arg("perimeter"));
  m.def("efficiency_gap", [](const Partition& p) {
    auto eg = efficiency_gap(p);
    return py::make_tuple(eg.gap, eg.per_district);
  }, py::arg("partition"), "returns (gap, per_district)");
  m.def("seat_allocation", [](const Partition& p) {
    const auto s = seat_allocation(p);
    return py::make_tuple(s.dem, s.rep);
  }, py::arg("partition"));
  m.def("score_plan", [](const Partition& p, const UnitGraph& g) {
    return to_py(nlohmann::json(score_plan(p, g)));
  }, py::arg("partition"), py::arg("graph"));

  m.def(
      "run_chain",
      [](const UnitGraph& graph, const Partition& initial, const std::string& method, std::size_t steps,
         std::uint64_t seed, double bias, double epsilon, double compactness_multiplier,
         std::size_t max_tree_retries, std::size_t record_assignments_every) {
        const auto c = chain_config(initial, method, steps, seed, bias, epsilon, compactness_multiplier,
                                    max_tree_retries, record_assignments_every);
        const auto dataset = dataset_fingerprint(graph);
        std::vector<StepRecord> records;
        {
          py::gil_scoped_release release;
          records = run_chain(c, graph);
        }
        py::list out;
        for (const auto& r : records) {
          auto j = record_to_json(r, dataset);
          if (r.assignment) j["assignment"] = *r.assignment;
          out.append(to_py(j));
        }
        return out;
      },
      py::arg("graph"), py::arg("initial_plan"), py::arg("method") = "RST", py::arg("steps") = 100,
      py::arg("seed") = 0, py::arg("bias") = 0.0, py::arg("epsilon") = 0.03,
      py::arg("compactness_multiplier") = 1.0, py::arg("max_tree_retries") = 10000,
      py::arg("record_assignments_every") = 0,
      "Runs a chain and returns its records as dicts, the seed plan first");

  m.def("kolmogorov_survival", &kolmogorov_survival, py::arg("lam"));
  m.def("ks_two_sample", [](const std::vector<double>& a, const std::vector<double>& b) {
    const auto r = ks_two_sample(a, b);
    return py::make_tuple(r.statistic, r.p_value);
  }, py::arg("a"), py::arg("b"), "returns (statistic, p_value)");
  m.def("summarize", [](const std::vector<double>& v) {
    const auto s = summarize(v);
    py::dict d;
    d["count"] = s.count;
    d["min"] = s.min;
    d["q1"] = s.q1;
    d["median"] = s.median;
    d["q3"] = s.q3;
    d["max"] = s.max;
    d["mean"] = s.mean;
    return d;
  }, py::arg("values"));
  m.def("seat_bands", [](const py::list& records) {
    Ensemble e{"python", "", {}};
    for (const auto& r : records) e.plans.push_back(from_py(r).get<PlanMetrics>());
    py::list out;
    for (const auto& b : seat_bands(e)) {
      py::dict d;
      d["seats_dem"] = b.seats_dem;
      d["seats_rep"] = b.seats_rep;
      d["count"] = b.count;
      d["mean_efficiency_gap"] = b.mean_efficiency_gap;
      out.append(d);
    }
    return out;
  }, py::arg("metrics"), "metrics: list of PlanMetrics dicts as returned by score_plan");

  // Command-level entry points mirroring the CLI.
  m.def(
      "ingest",
      [](const fs::path& nodes, const fs::path& edges, const fs::path& out,
         std::vector<fs::path> flow_matrices, std::vector<fs::path> device_flows,
         std::optional<fs::path> stats, std::optional<fs::path> ward_votes, std::optional<fs::path> weights) {
        IngestOptions o;
        o.nodes = nodes;
        o.edges = edges;
        o.out = out;
        o.flow_matrices = std::move(flow_matrices);
        o.device_flows = std::move(device_flows);
        o.stats = std::move(stats);
        o.ward_votes = std::move(ward_votes);
        o.weights = std::move(weights);
        return cmd_ingest(o).fingerprint;
      },
      py::arg("nodes"), py::arg("edges"), py::arg("out"), py::arg("flow_matrices") = std::vector<fs::path>{},
      py::arg("device_flows") = std::vector<fs::path>{}, py::arg("stats") = py::none(),
      py::arg("ward_votes") = py::none(), py::arg("weights") = py::none(),
      "Writes graph and flow artifacts; returns the dataset fingerprint");
  m.def(
      "run",
      [](const fs::path& config, const fs::path& artifacts, const fs::path& out,
         std::optional<std::uint64_t> seed, bool resume) {
        RunResult r;
        {
          py::gil_scoped_release release;
          r = cmd_run({config, artifacts, out, seed, resume});
        }
        return py::make_tuple(r.accepted, r.rejected, r.records);
      },
      py::arg("config"), py::arg("artifacts"), py::arg("out"), py::arg("seed") = py::none(),
      py::arg("resume") = false, "returns (accepted, rejected, records_path)");
  m.def("analyze", [](const std::vector<std::pair<std::string, fs::path>>& ensembles, const fs::path& out) {
    return to_py(cmd_analyze(ensembles, out));
  }, py::arg("ensembles"), py::arg("out"), "ensembles: list of (label, records.jsonl)");
  m.def(
      "export_web",
      [](const fs::path& artifacts, const std::vector<std::pair<std::string, fs::path>>& plans,
         const fs::path& geojson, const fs::path& out, std::optional<fs::path> analysis,
         const std::string& id_field) {
        ExportOptions o{artifacts, plans, geojson, id_field, std::move(analysis), out};
        return to_py(cmd_export_web(o));
      },
      py::arg("artifacts"), py::arg("plans"), py::arg("geojson"), py::arg("out"),
      py::arg("analysis") = py::none(), py::arg("id_field") = "id", "returns the bundle manifest");
  m.def("score", [](const fs::path& artifacts, const fs::path& plan) { return to_py(cmd_score(artifacts, plan)); },
        py::arg("artifacts"), py::arg("plan"));
}
