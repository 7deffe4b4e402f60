#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fewphoton/reference.hpp"
#include "fewphoton/scattering.hpp"
#include "fewphoton/scenario.hpp"

namespace py = pybind11;
using namespace fewphoton;

namespace {

SolvePath path_of(const std::string& name) {
  if (name == "auto") return SolvePath::Auto;
  if (name == "spectral") return SolvePath::Spectral;
  if (name == "direct") return SolvePath::Direct;
  throw Error(ErrorKind::InvalidParameter, "path must be auto, spectral or direct, got " + name);
}

std::size_t port_of(const ScatteringModel& m, const std::string& id) { return m.channels().require(id); }

std::vector<std::string> port_ids(const ScatteringModel& m) {
  std::vector<std::string> ids;
  for (std::size_t c : m.ports()) ids.push_back(m.channels().channels()[c].id);
  return ids;
}

py::array_t<double> grid(const std::vector<double>& v, std::size_t rows, std::size_t cols) {
  py::array_t<double> out({rows, cols});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

CorrelationSweep sweep_model(const ScatteringModel& m, const std::string& in, const std::string& out,
                             std::vector<double> deltas, std::vector<double> taus,
                             std::optional<std::string> out2, double flux, std::optional<double> carrier_base,
                             int threads, const std::string& path) {
  SweepPorts ports{port_of(m, in), port_of(m, out), {}};
  if (out2) ports.out2 = port_of(m, *out2);
  SweepOptions options;
  options.carrier_base = carrier_base;
  options.threads = threads;
  options.path = path_of(path);
  py::gil_scoped_release release;
  return sweep(m, ports, std::move(deltas), std::move(taus), flux, options);
}

}  // namespace

PYBIND11_MODULE(_fewphoton, m) {
  m.doc() = "One- and two-photon transport through Bose-Hubbard graphs with chiral channels";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error;
  error.call_once_and_store_result(
      [&]() { return py::exception<Error>(m, "FewPhotonError", PyExc_RuntimeError); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::object& cls = error.get_stored();
      py::object instance = cls(e.what());
      instance.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(cls.ptr(), instance.ptr());
    }
  });

  py::class_<Graph>(m, "Graph")
      .def(py::init([](const std::vector<std::pair<double, double>>& sites,
                       const std::vector<std::tuple<std::size_t, std::size_t, Complex>>& links) {
             std::vector<Site> s;
             for (auto [eps, U] : sites) s.push_back({eps, U});
             std::vector<Link> l;
             for (auto [i, j, t] : links) l.push_back({i, j, t});
             return Graph(std::move(s), std::move(l));
           }),
           py::arg("sites"), py::arg("links") = std::vector<std::tuple<std::size_t, std::size_t, Complex>>{},
           "sites: [(epsilon, U)], links: [(i, j, t)] with t multiplying b†_i b_j")
      .def_property_readonly("num_sites", &Graph::num_sites)
      .def_property_readonly("mean_epsilon", &Graph::mean_epsilon)
      .def("one_body_matrix", &Graph::one_body_matrix);

  py::class_<ScatteringModel>(m, "Model")
      .def_property_readonly("graph", &ScatteringModel::graph)
      .def_property_readonly("ports", &port_ids)
      .def_property_readonly("dims", &ScatteringModel::dims)
      .def_property_readonly("omega_ref", &ScatteringModel::omega_ref)
      .def("fallback", &ScatteringModel::fallback, py::arg("photons"))
      .def("s1", [](const ScatteringModel& s, double omega0, const std::string& path) {
             return s1_matrix(s, omega0, path_of(path));
           }, py::arg("omega0"), py::arg("path") = "auto")
      .def("a1", [](const ScatteringModel& s, const std::string& in, const std::string& out, double omega0,
                    double tau, const std::string& path) {
             return a1(s, port_of(s, in), port_of(s, out), omega0, tau, path_of(path));
           }, py::arg("in_port"), py::arg("out_port"), py::arg("omega0"), py::arg("tau") = 0.0,
           py::arg("path") = "auto")
      .def("a2", [](const ScatteringModel& s, const std::string& in, const std::string& out, double omega0,
                    double tau, const std::string& path) {
             return a2(s, port_of(s, in), port_of(s, out), omega0, tau, path_of(path));
           }, py::arg("in_port"), py::arg("out_port"), py::arg("omega0"), py::arg("tau") = 0.0,
           py::arg("path") = "auto")
      .def("g1", [](const ScatteringModel& s, const std::string& in, const std::string& out, double omega0,
                    double flux) { return g1(s, port_of(s, in), port_of(s, out), omega0, flux); },
           py::arg("in_port"), py::arg("out_port"), py::arg("omega0"), py::arg("flux") = 1.0)
      .def("g2", [](const ScatteringModel& s, const std::string& in, const std::string& a,
                    const std::string& b, double omega0, double tau, const std::string& path) {
             const auto r = g2_value(s, port_of(s, in), port_of(s, a), port_of(s, b), omega0, tau, path_of(path));
             return py::make_tuple(r.value, r.node);
           }, py::arg("in_port"), py::arg("a"), py::arg("b"), py::arg("omega0"), py::arg("tau") = 0.0,
           py::arg("path") = "auto", "returns (value, node); on a node the value is the raw ratio")
      .def("g2_cross", [](const ScatteringModel& s, const std::string& in, const std::string& out,
                          double omega0, double tau) {
             return g2_cross(s, port_of(s, in), port_of(s, out), omega0, tau);
           }, py::arg("in_port"), py::arg("out_port"), py::arg("omega0"), py::arg("tau") = 0.0)
      .def("g2_general", [](const ScatteringModel& s, const std::string& in, const std::string& a,
                            const std::string& b, double omega0, double tau) {
             return g2_general(s, port_of(s, in), port_of(s, a), port_of(s, b), omega0, tau);
           }, py::arg("in_port"), py::arg("a"), py::arg("b"), py::arg("omega0"), py::arg("tau") = 0.0)
      .def("t2", [](const ScatteringModel& s, double e1p, double e2p, double e1, double e2,
                    const std::string& path) {
             const T2Tensor t = t2_principal(s, e1p, e2p, e1, e2, path_of(path));
             const std::size_t n = t.num_ports();
             py::array_t<Complex> out({n, n, n, n});
             auto v = out.mutable_unchecked<4>();
             for (std::size_t a = 0; a < n; ++a)
               for (std::size_t b = 0; b < n; ++b)
                 for (std::size_t c = 0; c < n; ++c)
                   for (std::size_t d = 0; d < n; ++d) v(a, b, c, d) = t(a, b, c, d);
             return out;
           }, py::arg("e1p"), py::arg("e2p"), py::arg("e1"), py::arg("e2"), py::arg("path") = "auto",
           "principal-value two-photon T-matrix indexed (out1, out2, in1, in2) over ports")
      .def("sweep", &sweep_model, py::arg("in_port"), py::arg("out_port"), py::arg("deltas"),
           py::arg("taus") = std::vector<double>{}, py::arg("out2") = py::none(), py::arg("flux") = 1.0,
           py::arg("carrier_base") = py::none(), py::arg("threads") = 1, py::arg("path") = "auto");

  py::class_<CorrelationSweep>(m, "Sweep")
      .def_property_readonly("deltas", [](const CorrelationSweep& s) { return s.deltas; })
      .def_property_readonly("taus", [](const CorrelationSweep& s) { return s.taus; })
      .def_property_readonly("carrier_base", [](const CorrelationSweep& s) { return s.carrier_base; })
      .def_property_readonly("s1", [](const CorrelationSweep& s) { return s.s1; })
      .def_property_readonly("transmission", [](const CorrelationSweep& s) { return s.transmission; })
      .def_property_readonly("g1", [](const CorrelationSweep& s) { return s.g1; })
      .def_property_readonly("g2", [](const CorrelationSweep& s) {
        return grid(s.g2, s.deltas.size(), s.taus.size());
      })
      .def_property_readonly("flags", [](const CorrelationSweep& s) {
        py::array_t<std::uint32_t> out({s.deltas.size(), s.taus.size()});
        std::copy(s.flags.begin(), s.flags.end(), out.mutable_data());
        return out;
      })
      .def_property_readonly("fallback_used", [](const CorrelationSweep& s) { return s.fallback_used; })
      .def("flag_names", [](const CorrelationSweep& s, std::size_t d, std::size_t t) {
        return flag_string(s.flags_at(d, t));
      }, py::arg("delta_index"), py::arg("tau_index"));

  py::class_<Scenario>(m, "Scenario")
      .def_property_readonly("preset", [](const Scenario& s) { return s.preset; })
      .def_property_readonly("graph", [](const Scenario& s) { return s.graph; })
      .def_property_readonly("carrier_base", &Scenario::carrier_base)
      .def("model", [](const Scenario& s) { return build_model(s); })
      .def("run", [](const Scenario& s, int threads) {
             RunOptions options;
             options.threads = threads;
             py::gil_scoped_release release;
             return run(s, options);
           }, py::arg("threads") = 1)
      .def("format", [](const Scenario& s, const CorrelationSweep& sw, const std::string& format) {
             std::ostringstream os;
             if (format == "csv") {
               write_output(os, OutputFormat::Csv, s, sw);
             } else if (format == "gnuplot") {
               write_output(os, OutputFormat::Gnuplot, s, sw);
             } else {
               throw Error(ErrorKind::InvalidParameter, "format must be csv or gnuplot");
             }
             return os.str();
           }, py::arg("sweep"), py::arg("format") = "csv");

  m.def("parse_scenario", [](const std::string& text) { return parse_scenario(text); }, py::arg("text"));
  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("preset_names", &preset_names);
  m.def("list_presets", &list_presets);
  m.def("preset", [](const std::string& name, const PresetParams& params) {
          auto p = make_preset(name, params);
          return finalize(std::move(p.graph), std::move(p.channels));
        }, py::arg("name"), py::arg("params") = PresetParams{});

  auto ref = m.def_submodule("reference", "closed forms for the Kerr site, dimer and chain");
  ref.def("kerr_g1", &reference::kerr_g1_closed, py::arg("delta"), py::arg("gamma"), py::arg("flux") = 1.0);
  ref.def("kerr_g2", &reference::kerr_g2_closed, py::arg("delta"), py::arg("U"), py::arg("gamma"),
          py::arg("tau") = 0.0);
  ref.def("kerr_a1", &reference::kerr_a1_closed, py::arg("delta"), py::arg("gamma"), py::arg("tau") = 0.0);
  ref.def("kerr_a2", &reference::kerr_a2_closed, py::arg("delta"), py::arg("U"), py::arg("gamma"),
          py::arg("tau") = 0.0);
  ref.def("dimer_a1", &reference::dimer_a1_closed, py::arg("delta"), py::arg("t"), py::arg("Gamma"));
  ref.def("dimer_a2", &reference::dimer_a2_closed, py::arg("delta"), py::arg("U"), py::arg("t"),
          py::arg("Gamma"));
  ref.def("dimer_two_photon_energies", &reference::dimer_two_photon_energies, py::arg("epsilon"),
          py::arg("U"), py::arg("t"));
  ref.def("chain_spectrum", &reference::chain_spectrum_closed, py::arg("num_sites"), py::arg("epsilon"),
          py::arg("t"));
}
