#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "netsense/analysis.hpp"
#include "netsense/dynamics.hpp"
#include "netsense/error.hpp"
#include "netsense/graph.hpp"
#include "netsense/sensitivity.hpp"
#include "netsense/simulate.hpp"
#include "netsense/spectral.hpp"

namespace py = pybind11;
using namespace netsense;

namespace {

GraphParams make_params(const std::string& kind, int n, std::uint64_t seed, double p, int m, double gamma, int k_min,
                    int lattice_k, double rewire, double radius, const std::string& weights) {
    GraphParams s;
    s.kind = parse_graph_kind(kind);
    s.n = n;
    s.seed = seed;
    s.p = p;
    s.m = m;
    s.gamma = gamma;
    s.k_min = k_min;
    s.k = lattice_k;
    s.rewire = rewire;
    s.radius = radius;
    s.weights = parse_weight_dist(weights);
    return s;
}

#define NETSENSE_SPEC_ARGS                                                                                   \
    py::arg("p") = 0.0, py::arg("m") = 1, py::arg("gamma") = 2.5, py::arg("k_min") = 1, py::arg("lattice_k") = 2, \
        py::arg("rewire") = 0.0, py::arg("radius") = 0.1, py::arg("weights") = "constant"

WeightMode parse_weight_mode(const std::string& s) {
    if (s == "from_file" || s == "from-file") return WeightMode::from_file;
    if (s == "constant") return WeightMode::constant;
    throw InvalidArgument("weights must be 'from_file' or 'constant'");
}

InteractionMatrix as_matrix(const Eigen::MatrixXd& a) { return InteractionMatrix::from_dense(a); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Dynamic sensitivity of linearly coupled networks (C++ core)";
    m.attr("__version__") = NETSENSE_VERSION;

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<PoleError>(m, "PoleError", base.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
    py::register_exception<UnstableError>(m, "UnstableError", base.ptr());
    py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());
    py::register_exception<UndefinedStatistic>(m, "UndefinedStatistic", base.ptr());

    // ---- graphs

    py::class_<WeightedGraph>(m, "Graph")
        .def_static(
            "from_edges",
            [](int n, const std::vector<std::tuple<int, int, double>>& edges) {
                std::vector<Edge> e;
                e.reserve(edges.size());
                for (const auto& [u, v, w] : edges) e.push_back({u, v, w});
                return WeightedGraph::from_edges(n, std::move(e));
            },
            py::arg("n"), py::arg("edges"), "Edges as (u, v, weight) triples.")
        .def_property_readonly("n", &WeightedGraph::n)
        .def_property_readonly("kappa", &WeightedGraph::kappa)
        .def_property_readonly("degree", &WeightedGraph::degree)
        .def_property_readonly("edges",
                               [](const WeightedGraph& g) {
                                   std::vector<std::tuple<int, int, double>> out;
                                   for (const auto& e : g.edges()) out.emplace_back(e.u, e.v, e.weight);
                                   return out;
                               })
        .def("__len__", &WeightedGraph::n)
        .def("__repr__", [](const WeightedGraph& g) {
            return "<Graph n=" + std::to_string(g.n()) + " edges=" + std::to_string(g.edge_count()) + ">";
        });

    m.def(
        "generate",
        [](const std::string& kind, int n, std::uint64_t seed, double p, int mm, double gamma, int k_min, int lattice_k,
           double rewire, double radius, const std::string& weights) {
            return generate(make_params(kind, n, seed, p, mm, gamma, k_min, lattice_k, rewire, radius, weights));
        },
        py::arg("kind"), py::arg("n"), py::arg("seed") = 0, NETSENSE_SPEC_ARGS,
        "Sample a graph; deterministic in (parameters, seed).");

    m.def(
        "load_edge_list",
        [](const std::string& path, const std::string& weights) {
            auto load = load_edge_list(path, parse_weight_mode(weights));
            return py::make_tuple(load.graph, load.labels);
        },
        py::arg("path"), py::arg("weights") = "from_file", "Returns (graph, labels).");

    m.def(
        "interaction_matrix", [](const WeightedGraph& g) { return InteractionMatrix(g).dense(); }, py::arg("graph"));

    // ---- spectral

    py::class_<SpectralDecomposition>(m, "SpectralDecomposition")
        .def_readonly("eigenvalues", &SpectralDecomposition::eigenvalues)
        .def_readonly("eigenvectors", &SpectralDecomposition::eigenvectors)
        .def_readonly("weights", &SpectralDecomposition::weights)
        .def_readonly("residue", &SpectralDecomposition::residue);

    m.def(
        "decompose", [](const Eigen::MatrixXd& a) { return decompose(as_matrix(a)); }, py::arg("a"));
    m.def(
        "decompose", [](const WeightedGraph& g) { return decompose(InteractionMatrix(g)); }, py::arg("graph"));
    m.def(
        "leading_mode",
        [](const WeightedGraph& g) {
            const auto l = leading_mode(g);
            return py::make_tuple(l.lambda, l.weight);
        },
        py::arg("graph"), "Returns (lambda_1, w_1).");

    // ---- dynamics

    py::class_<NodalDynamics>(m, "NodalDynamics")
        .def_static("first_order", py::overload_cast<double, double>(&NodalDynamics::first_order), py::arg("omega_n"),
                    py::arg("k"))
        .def_static("second_order", py::overload_cast<double, double, double>(&NodalDynamics::second_order),
                    py::arg("omega_n"), py::arg("zeta"), py::arg("k"))
        .def_static("custom", &NodalDynamics::custom, py::arg("g_coeffs"))
        .def_property_readonly("g_coeffs", &NodalDynamics::g_coeffs)
        .def_property_readonly("natural_frequency", &NodalDynamics::natural_frequency)
        .def("g", &NodalDynamics::g, py::arg("s"))
        .def("f", [](const NodalDynamics& d, Complex s) { return f_eval(d, s); }, py::arg("s"))
        .def("h", [](const NodalDynamics& d, double lambda, Complex s) { return h_eval(d, lambda, s); },
             py::arg("lam"), py::arg("s"))
        .def(
            "is_stable",
            [](const NodalDynamics& d, double lambda) {
                const auto st = is_stable(d, lambda);
                return py::make_tuple(st.stable, st.margin);
            },
            py::arg("lam"), "Returns (stable, margin).")
        .def("er_limit_model", [](const NodalDynamics& d) { return er_limit_model(d); })
        .def("__repr__", [](const NodalDynamics& d) { return "<NodalDynamics " + to_json(d).dump() + ">"; });

    m.def("max_stable_gain", &max_stable_gain, py::arg("omega_n"), py::arg("zeta"), py::arg("lambda_max"),
          py::arg("safety_c"));

    // ---- sensitivity

    m.def(
        "node_sensitivity",
        [](const Eigen::MatrixXd& a, const NodalDynamics& d, double omega) {
            return Eigen::VectorXcd(node_sensitivity(as_matrix(a), d, omega));
        },
        py::arg("a"), py::arg("dyn"), py::arg("omega"));
    m.def(
        "mean_sensitivity",
        [](const Eigen::MatrixXd& a, const NodalDynamics& d, double omega) {
            return mean_sensitivity_direct(as_matrix(a), d, omega);
        },
        py::arg("a"), py::arg("dyn"), py::arg("omega"));
    m.def(
        "mean_sensitivity_spectral",
        [](const SpectralDecomposition& dec, const NodalDynamics& d, double omega) {
            const auto s = mean_sensitivity_spectral(dec, d, omega);
            return py::make_tuple(s.total, s.first_mode, s.residue_part);
        },
        py::arg("dec"), py::arg("dyn"), py::arg("omega"), "Returns (total, first_mode, residue_part).");

    py::class_<FrequencySweep>(m, "FrequencySweep")
        .def_property_readonly("omegas",
                               [](const FrequencySweep& s) {
                                   return std::vector<double>(s.grid.omegas().begin(), s.grid.omegas().end());
                               })
        .def_readonly("node_response", &FrequencySweep::node_response)
        .def_readonly("mean_response", &FrequencySweep::mean_response)
        .def_readonly("first_mode", &FrequencySweep::first_mode)
        .def_readonly("residue_part", &FrequencySweep::residue_part)
        .def_readonly("skipped", &FrequencySweep::skipped);

    m.def(
        "sweep",
        [](const WeightedGraph& g, const NodalDynamics& d, std::vector<double> omegas) {
            const InteractionMatrix a(g);
            return sweep(a, decompose(a), d, FrequencyGrid::from_values(std::move(omegas)));
        },
        py::arg("graph"), py::arg("dyn"), py::arg("omegas"));
    m.def(
        "log_grid",
        [](double lo, double hi, int count) {
            const auto g = FrequencyGrid::log_spaced(lo, hi, count);
            return std::vector<double>(g.omegas().begin(), g.omegas().end());
        },
        py::arg("lo"), py::arg("hi"), py::arg("count"));

    // ---- analysis

    m.def(
        "degree_correlation",
        [](const WeightedGraph& g, const FrequencySweep& sw) {
            const auto c = degree_correlation(g, sw);
            py::dict d;
            d["omegas"] = c.omegas;
            d["spearman"] = c.spearman;
            d["pearson"] = c.pearson;
            return d;
        },
        py::arg("graph"), py::arg("sweep"));
    m.def(
        "find_crossover",
        [](const std::vector<double>& omegas, const std::vector<double>& spearman, int persistence) {
            CorrelationCurve c{omegas, spearman, spearman};
            return find_crossover(c, persistence);
        },
        py::arg("omegas"), py::arg("spearman"), py::arg("persistence") = 5, "None when there is no crossover.");
    m.def(
        "count_peaks", [](const FrequencySweep& sw, double prominence_db) { return count_peaks(sw, prominence_db); },
        py::arg("sweep"), py::arg("prominence_db") = 3.0);
    m.def(
        "weight_scaling",
        [](const std::string& kind, const std::vector<int>& sizes, int trials, const std::string& mode,
           std::uint64_t seed, double p, int mm, double gamma, int k_min, int lattice_k, double rewire, double radius,
           const std::string& weights) {
            const auto family = make_params(kind, 0, seed, p, mm, gamma, k_min, lattice_k, rewire, radius, weights);
            const auto r = weight_scaling(family, sizes, trials, parse_scaling_mode(mode));
            py::dict d;
            d["sizes"] = r.sizes;
            d["w1"] = r.w1;
            d["w1_median"] = r.w1_median;
            d["slope"] = r.fit.slope;
            d["intercept"] = r.fit.intercept;
            d["r_squared"] = r.fit.r_squared;
            d["excluded"] = r.excluded;
            return d;
        },
        py::arg("kind"), py::arg("sizes"), py::arg("trials"), py::arg("mode"), py::arg("seed") = 0,
        NETSENSE_SPEC_ARGS);

    // ---- simulation

    m.def(
        "simulate_forced",
        [](const Eigen::MatrixXd& a, const NodalDynamics& d, double omega, double amplitude, std::optional<double> dt,
           std::optional<double> t_end, double decay_rate) {
            auto cfg = recommended_sim_config(d, decay_rate, {omega, amplitude});
            if (dt) cfg.dt = *dt;
            if (t_end) cfg.t_end = *t_end;
            const auto traj = simulate_forced(as_matrix(a), d, cfg);
            return py::make_tuple(traj.t, traj.x);
        },
        py::arg("a"), py::arg("dyn"), py::arg("omega"), py::arg("amplitude") = 1.0, py::arg("dt") = py::none(),
        py::arg("t_end") = py::none(), py::arg("decay_rate") = 0.05, "Returns (t, x) with x of shape (samples, n).");
    m.def(
        "steady_state",
        [](const std::vector<double>& t, const Eigen::MatrixXd& x, double omega, double amplitude) {
            const Trajectory traj{t, x};
            const auto ss = steady_state(traj, omega, amplitude);
            return py::make_tuple(ss.amplitude, ss.phase, ss.steady);
        },
        py::arg("t"), py::arg("x"), py::arg("omega"), py::arg("amplitude") = 1.0,
        "Returns (amplitude, phase_rad, steady).");
}
