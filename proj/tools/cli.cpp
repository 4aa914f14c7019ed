#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "netsense/analysis.hpp"
#include "netsense/dynamics.hpp"
#include "netsense/error.hpp"
#include "netsense/format.hpp"
#include "netsense/graph.hpp"
#include "netsense/sensitivity.hpp"
#include "netsense/simulate.hpp"
#include "netsense/spectral.hpp"
#include "netsense/svg.hpp"

namespace netsense::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kDefaultMargin = 0.1;

// ---- config plumbing -------------------------------------------------------------------

void check_keys(const json& section, const char* name, std::initializer_list<const char*> allowed) {
    if (!section.is_object()) throw InvalidArgument(std::string("config section '") + name + "' must be an object");
    for (const auto& [key, _] : section.items())
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw InvalidArgument(std::string("unknown key '") + key + "' in config section '" + name + "'");
}

json section_of(const json& cfg, const char* name) { return cfg.contains(name) ? cfg.at(name) : json::object(); }

template <class T>
T value_or(const json& section, const char* key, T fallback) {
    return section.contains(key) ? section.at(key).get<T>() : fallback;
}

std::uint64_t parse_seed(const std::string& text) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw InvalidArgument("seed must be a non-negative integer, got '" + text + "'");
    return v;
}

GraphParams graph_params(const json& cfg, bool validate = true) {
    const json g = section_of(cfg, "graph");
    check_keys(g, "graph",
               {"kind", "n", "p", "m", "gamma", "k_min", "lattice_k", "rewire", "radius", "path", "file_weights",
                "weights"});
    GraphParams s;
    s.kind = parse_graph_kind(value_or<std::string>(g, "kind", "er"));
    s.n = value_or(g, "n", 0);
    s.p = value_or(g, "p", 0.0);
    s.m = value_or(g, "m", s.m);
    s.gamma = value_or(g, "gamma", s.gamma);
    s.k_min = value_or(g, "k_min", s.k_min);
    s.k = value_or(g, "lattice_k", s.k);
    s.rewire = value_or(g, "rewire", s.rewire);
    s.radius = value_or(g, "radius", s.radius);
    s.path = value_or<std::string>(g, "path", "");
    const auto fw = value_or<std::string>(g, "file_weights", "from_file");
    if (fw == "from_file" || fw == "from-file")
        s.file_weights = WeightMode::from_file;
    else if (fw == "constant")
        s.file_weights = WeightMode::constant;
    else
        throw InvalidArgument("file_weights must be 'from_file' or 'constant'");
    s.weights = parse_weight_dist(value_or<std::string>(g, "weights", "constant"));
    s.seed = cfg.at("seed").get<std::uint64_t>();
    if (validate) s.validate();
    return s;
}

struct LoadedGraph {
    WeightedGraph graph;
    std::vector<std::string> labels;  // file graphs only
    std::size_t duplicates = 0;
    std::size_t self_loops = 0;
};

LoadedGraph load_graph(const GraphParams& s) {
    if (s.kind == GraphKind::file) {
        if (s.path.empty()) throw InvalidArgument("graph kind 'file' needs a path");
        auto load = load_edge_list(s.path, s.file_weights);
        return {std::move(load.graph), std::move(load.labels), load.duplicates, load.self_loops};
    }
    return {generate(s), {}, 0, 0};
}

/// Dynamics section with the coupling gain filled in. When no gain is configured for a
/// canonical oscillator it is set to (1 - margin) / lambda_1.
NodalDynamics resolve_dynamics(const json& cfg, double lambda_1) {
    json d = section_of(cfg, "dynamics");
    check_keys(d, "dynamics", {"order", "omega_n", "zeta", "k", "margin", "g_coeffs"});
    const double margin = value_or(d, "margin", kDefaultMargin);
    d.erase("margin");
    if (d.contains("g_coeffs")) return dynamics_from_json(d);
    if (!d.contains("order")) d["order"] = 2;
    if (!d.contains("omega_n")) d["omega_n"] = 1.0;
    if (d.at("order") == 2 && !d.contains("zeta")) d["zeta"] = 0.05;
    if (!d.contains("k")) {
        if (!(lambda_1 > 0.0)) throw InvalidArgument("cannot choose a coupling gain: lambda_1 <= 0; set dynamics.k");
        d["k"] = max_stable_gain(d.at("omega_n").get<double>(), value_or(d, "zeta", 1.0), lambda_1, margin);
    }
    return dynamics_from_json(d);
}

FrequencyGrid resolve_grid(const json& cfg, const NodalDynamics& dyn) {
    const json g = section_of(cfg, "grid");
    check_keys(g, "grid", {"w_min", "w_max", "points"});
    const double wn = dyn.natural_frequency();
    return FrequencyGrid::log_spaced(value_or(g, "w_min", 1e-2 * wn), value_or(g, "w_max", 1e2 * wn),
                                     value_or(g, "points", 400));
}

ClassThresholds resolve_thresholds(const json& cfg) {
    const json c = section_of(cfg, "classify");
    check_keys(c, "classify", {"max_slope", "min_r_squared", "min_band", "prominence_db"});
    ClassThresholds t;
    t.max_slope = value_or(c, "max_slope", t.max_slope);
    t.min_r_squared = value_or(c, "min_r_squared", t.min_r_squared);
    t.min_band = value_or(c, "min_band", t.min_band);
    t.prominence_db = value_or(c, "prominence_db", t.prominence_db);
    if (!(t.prominence_db > 0.0)) throw InvalidArgument("prominence_db must be > 0");
    return t;
}

// ---- output plumbing -------------------------------------------------------------------

class Outputs {
public:
    explicit Outputs(const json& cfg) : dir_(cfg.at("out").get<std::string>()) {
        for (const auto& f : cfg.at("formats")) {
            const auto name = f.get<std::string>();
            if (name != "csv" && name != "json" && name != "svg")
                throw InvalidArgument("unknown output format '" + name + "' (expected csv, json or svg)");
            formats_.insert(name);
        }
    }

    [[nodiscard]] bool wants(const std::string& format) const { return formats_.count(format) != 0; }

    void write(const std::string& name, const std::string& content) {
        fs::create_directories(dir_);
        const fs::path path = dir_ / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write " + path.string());
        out << content;
        if (!out) throw IoError("write failed for " + path.string());
        artifacts_.push_back(name);
    }

    void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

    [[nodiscard]] const std::vector<std::string>& artifacts() const { return artifacts_; }
    [[nodiscard]] const fs::path& dir() const { return dir_; }

private:
    fs::path dir_;
    std::set<std::string> formats_;
    std::vector<std::string> artifacts_;
};

json versions() {
    return {{"netsense", NETSENSE_VERSION},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
            {"compiler", __VERSION__}};
}

json graph_stats(const LoadedGraph& lg) {
    const auto& g = lg.graph;
    std::map<int, int> hist;
    for (int d : g.degree()) ++hist[d];
    json h = json::array();
    for (const auto& [d, c] : hist) h.push_back({d, c});
    json j = {{"n", g.n()},
              {"edges", g.edge_count()},
              {"kappa", g.kappa()},
              {"min_degree", hist.empty() ? 0 : hist.begin()->first},
              {"max_degree", hist.empty() ? 0 : hist.rbegin()->first},
              {"degree_histogram", h}};
    if (!lg.labels.empty()) {
        j["duplicates_skipped"] = lg.duplicates;
        j["self_loops_skipped"] = lg.self_loops;
    }
    return j;
}

std::vector<double> to_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

std::vector<double> db_of(const std::vector<Complex>& z) {
    std::vector<double> out;
    out.reserve(z.size());
    for (const auto& v : z) out.push_back(magnitude_db(v));
    return out;
}

json sweep_summary(const WeightedGraph& g, const SpectralDecomposition& dec, const NodalDynamics& dyn,
                   const FrequencySweep& sw, double prominence_db) {
    const auto lam1 = dec.eigenvalues(0);
    const auto lamn = dec.eigenvalues(dec.n() - 1);
    const double margin = std::min(is_stable(dyn, lam1).margin, is_stable(dyn, lamn).margin);
    json peaks = json::array();
    const auto idx = find_peaks(sw, prominence_db);
    for (auto i : idx) peaks.push_back({{"omega", sw.grid[i]}, {"mag_db", magnitude_db(sw.mean_response[i])}});
    return {{"n", g.n()},
            {"edges", g.edge_count()},
            {"kappa", g.kappa()},
            {"lambda_1", lam1},
            {"lambda_n", lamn},
            {"w1", dec.weights(0)},
            {"residue", dec.residue},
            {"stability_margin", margin},
            {"dynamics", to_json(dyn)},
            {"peak_count", idx.size()},
            {"peaks", peaks},
            {"residue_band", longest_residue_band(sw, idx.empty() ? 0 : idx.front() + 1)},
            {"skipped", sw.skipped}};
}

std::string bode_svg(const FrequencySweep& sw, const std::string& title) {
    const auto w = to_vector(sw.grid.omegas());
    std::vector<double> phase;
    for (const auto& v : sw.mean_response) phase.push_back(phase_deg(v));
    Panel mag{"magnitude [dB]", false,
              {{"mean", "#1f77b4", w, db_of(sw.mean_response)},
               {"first mode", "#2ca02c", w, db_of(sw.first_mode)},
               {"residue", "#d62728", w, db_of(sw.residue_part)}}};
    Panel ph{"phase [deg]", false, {{"mean", "#1f77b4", w, phase}}};
    return render_svg(title, "omega [rad/s]", {mag, ph});
}

// ---- subcommands -----------------------------------------------------------------------

int cmd_gen(const json& cfg, Outputs& out, std::ostream& msg) {
    const auto lg = load_graph(graph_params(cfg));
    std::ostringstream edges;
    write_edge_list(edges, lg.graph);
    out.write("graph.txt", edges.str());
    if (!lg.labels.empty()) {
        std::ostringstream labels;
        labels << "node,label\n";
        for (std::size_t i = 0; i < lg.labels.size(); ++i) labels << i << ',' << lg.labels[i] << '\n';
        out.write("labels.csv", labels.str());
    }
    const auto stats = graph_stats(lg);
    out.write_json("stats.json", stats);
    msg << "n = " << lg.graph.n() << ", edges = " << lg.graph.edge_count()
        << ", kappa = " << format_double(lg.graph.kappa()) << '\n';
    return kOk;
}

struct Prepared {
    LoadedGraph graph;
    InteractionMatrix a;
    SpectralDecomposition dec;
    NodalDynamics dyn;
};

Prepared prepare(const json& cfg) {
    auto lg = load_graph(graph_params(cfg));
    // Edgeless graphs are decoupled nodes rather than an error here.
    auto a = lg.graph.edge_count() == 0 ? InteractionMatrix::from_dense(Eigen::MatrixXd::Zero(lg.graph.n(), lg.graph.n()))
                                        : InteractionMatrix(lg.graph);
    auto dec = decompose(a);
    auto dyn = resolve_dynamics(cfg, dec.eigenvalues(0));
    return {std::move(lg), std::move(a), std::move(dec), std::move(dyn)};
}

int cmd_sweep(const json& cfg, Outputs& out, std::ostream& msg) {
    const auto p = prepare(cfg);
    const auto grid = resolve_grid(cfg, p.dyn);
    const auto sw = sweep(p.a, p.dec, p.dyn, grid);
    const bool per_node = value_or(cfg, "per_node", false);
    if (out.wants("csv")) {
        std::ostringstream csv;
        write_sweep_csv(csv, sw, per_node);
        out.write("sweep.csv", csv.str());
    }
    const auto summary = sweep_summary(p.graph.graph, p.dec, p.dyn, sw, resolve_thresholds(cfg).prominence_db);
    if (out.wants("json")) out.write_json("sweep.json", summary);
    if (out.wants("svg")) out.write("bode.svg", bode_svg(sw, "mean sensitivity"));
    msg << "lambda_1 = " << format_double(p.dec.eigenvalues(0)) << ", w1 = " << format_double(p.dec.weights(0))
        << ", peaks = " << summary.at("peak_count").get<int>() << '\n';
    return kOk;
}

int cmd_correlate(const json& cfg, Outputs& out, std::ostream& msg) {
    const auto p = prepare(cfg);
    const auto grid = resolve_grid(cfg, p.dyn);
    const auto sw = sweep(p.a, p.dec, p.dyn, grid);
    const auto curve = degree_correlation(p.graph.graph, sw);
    const auto x = find_crossover(curve);
    if (out.wants("csv")) {
        std::ostringstream csv;
        write_correlation_csv(csv, curve);
        out.write("correlation.csv", csv.str());
    }
    if (out.wants("json")) {
        json j = {{"curve", to_json(curve)},
                  {"crossover", x ? json(*x) : json(nullptr)},
                  {"dynamics", to_json(p.dyn)},
                  {"lambda_1", p.dec.eigenvalues(0)}};
        out.write_json("correlation.json", j);
    }
    if (out.wants("svg")) {
        Panel panel{"correlation with degree", false,
                    {{"spearman", "#1f77b4", curve.omegas, curve.spearman},
                     {"pearson", "#ff7f0e", curve.omegas, curve.pearson}}};
        out.write("correlation.svg", render_svg("degree vs |S_i|", "omega [rad/s]", {panel}));
    }
    if (x)
        msg << "crossover at omega = " << format_double(*x) << '\n';
    else
        msg << "no crossover\n";
    return kOk;
}

int cmd_scaling(const json& cfg, Outputs& out, std::ostream& msg) {
    const json sc = section_of(cfg, "scaling");
    check_keys(sc, "scaling", {"sizes", "trials", "mode", "classify_n"});
    auto family = graph_params(cfg, false);
    if (family.kind == GraphKind::file) throw InvalidArgument("scaling needs a generated graph family");
    const auto sizes = value_or(sc, "sizes", std::vector<int>{256, 512, 1024, 2048, 4096});
    const int trials = value_or(sc, "trials", 10);
    const auto mode = sc.contains("mode") ? parse_scaling_mode(sc.at("mode").get<std::string>())
                                          : (family.kind == GraphKind::er ? ScalingMode::er : ScalingMode::sf);
    const auto result = weight_scaling(family, sizes, trials, mode);

    // Frequency-domain evidence from one member of the family.
    const int largest = sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
    family.n = value_or(sc, "classify_n", std::min(largest, 2048));
    const LoadedGraph member{generate(family), {}, 0, 0};
    const InteractionMatrix a(member.graph);
    const auto dec = decompose(a);
    const auto dyn = resolve_dynamics(cfg, dec.eigenvalues(0));
    const auto sw = sweep(a, dec, dyn, resolve_grid(cfg, dyn));
    const auto thresholds = resolve_thresholds(cfg);
    const auto verdict = classify(result, sw, thresholds);

    if (out.wants("csv")) {
        std::ostringstream csv;
        write_scaling_csv(csv, result);
        out.write("scaling.csv", csv.str());
    }
    if (out.wants("json")) {
        json j = {{"scaling", to_json(result)},
                  {"verdict", to_json(verdict)},
                  {"classify_n", family.n},
                  {"thresholds", {{"max_slope", thresholds.max_slope},
                                  {"min_r_squared", thresholds.min_r_squared},
                                  {"min_band", thresholds.min_band},
                                  {"prominence_db", thresholds.prominence_db}}},
                  {"sweep", sweep_summary(member.graph, dec, dyn, sw, thresholds.prominence_db)}};
        out.write_json("scaling.json", j);
    }
    if (out.wants("svg")) {
        std::vector<double> n(result.sizes.begin(), result.sizes.end());
        Panel panel{mode == ScalingMode::er ? "median 1 - w1" : "median w1", true,
                    {{"median", "#1f77b4", n, result.regressed_median}}};
        out.write("scaling.svg", render_svg("spectral weight scaling", "N", {panel}));
        out.write("classify_bode.svg", bode_svg(sw, "mean sensitivity, N = " + std::to_string(family.n)));
    }
    msg << "class " << to_string(verdict.cls) << " (slope " << format_double(result.fit.slope) << ", R^2 "
        << format_double(result.fit.r_squared) << ", peaks " << verdict.evidence.peak_count << ")\n";
    return kOk;
}

double wrap_degrees(double d) {
    d = std::fmod(d + 180.0, 360.0);
    if (d < 0.0) d += 360.0;
    return d - 180.0;
}

int cmd_simulate(const json& cfg, Outputs& out, std::ostream& msg) {
    const json sim = section_of(cfg, "sim");
    check_keys(sim, "sim", {"omegas", "amplitude", "dt", "t_end", "decimation"});
    const auto p = prepare(cfg);
    const double lam1 = p.dec.eigenvalues(0);
    const double lamn = p.dec.eigenvalues(p.dec.n() - 1);
    double decay = std::numeric_limits<double>::infinity();
    for (double lam : {lam1, lamn}) {
        const auto st = is_stable(p.dyn, lam);
        if (!st.stable)
            throw UnstableError("coupled system is unstable at eigenvalue " + format_double(lam) + " (margin " +
                                    format_double(st.margin) + ")",
                                lam, st.margin);
        decay = std::min(decay, st.margin);
    }
    const auto omegas = value_or(sim, "omegas", std::vector<double>{p.dyn.natural_frequency()});
    const double amplitude = value_or(sim, "amplitude", 1.0);
    const int decimation = value_or(sim, "decimation", 10);
    if (decimation < 1) throw InvalidArgument("decimation must be >= 1");

    std::ostringstream report_csv;
    report_csv << "omega,node,sim_amplitude,sim_phase_deg,pred_amplitude,pred_phase_deg,amplitude_error_pct,"
                  "phase_error_deg\n";
    json runs = json::array();
    double worst_amp = 0.0;
    double worst_phase = 0.0;
    for (std::size_t r = 0; r < omegas.size(); ++r) {
        const double w = omegas[r];
        auto sc = recommended_sim_config(p.dyn, decay, {w, amplitude});
        if (sim.contains("dt")) sc.dt = sim.at("dt").get<double>();
        if (sim.contains("t_end")) sc.t_end = sim.at("t_end").get<double>();
        const auto traj = simulate_forced(p.a, p.dyn, sc);
        const auto ss = steady_state(traj, w, amplitude);
        const auto pred = node_sensitivity(p.a, p.dyn, w);
        json nodes = json::array();
        for (int i = 0; i < p.a.n(); ++i) {
            const auto k = static_cast<std::size_t>(i);
            const double pa = std::abs(pred(i));
            const double pp = std::arg(pred(i)) * 180.0 / std::numbers::pi;
            const double sp = ss.phase[k] * 180.0 / std::numbers::pi;
            const double amp_err = 100.0 * std::abs(ss.amplitude[k] - pa) / pa;
            const double ph_err = std::abs(wrap_degrees(sp - pp));
            worst_amp = std::max(worst_amp, amp_err);
            worst_phase = std::max(worst_phase, ph_err);
            report_csv << format_double(w) << ',' << i << ',' << format_double(ss.amplitude[k]) << ','
                       << format_double(sp) << ',' << format_double(pa) << ',' << format_double(pp) << ','
                       << format_double(amp_err) << ',' << format_double(ph_err) << '\n';
            nodes.push_back({{"node", i},
                             {"sim_amplitude", ss.amplitude[k]},
                             {"sim_phase_deg", sp},
                             {"pred_amplitude", pa},
                             {"pred_phase_deg", pp},
                             {"amplitude_error_pct", amp_err},
                             {"phase_error_deg", ph_err}});
        }
        runs.push_back({{"omega", w}, {"dt", sc.dt}, {"t_end", sc.t_end}, {"steady", ss.steady}, {"nodes", nodes}});
        if (out.wants("csv")) {
            std::ostringstream csv;
            write_trajectory_csv(csv, traj, decimation);
            out.write("trajectory_" + std::to_string(r) + ".csv", csv.str());
        }
    }
    if (out.wants("csv")) out.write("report.csv", report_csv.str());
    if (out.wants("json"))
        out.write_json("report.json", {{"runs", runs},
                                       {"dynamics", to_json(p.dyn)},
                                       {"max_amplitude_error_pct", worst_amp},
                                       {"max_phase_error_deg", worst_phase}});
    msg << "max amplitude error " << format_double(worst_amp) << "%, max phase error " << format_double(worst_phase)
        << " deg\n";
    return kOk;
}

// ---- flag registration -----------------------------------------------------------------

/// Flags are registered against a (section, key) path of the config and copied into the
/// override object only when given on the command line.
class FlagTable {
public:
    template <class T>
    CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& section, const std::string& key,
                     const std::string& help) {
        auto value = std::make_shared<T>();
        CLI::Option* opt = app->add_option(flag, *value, help);
        setters_.push_back([opt, value, section, key](json& j) {
            if (opt->count() == 0) return;
            if (section.empty())
                j[key] = *value;
            else
                j[section][key] = *value;
        });
        return opt;
    }

    void add_switch(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
        auto value = std::make_shared<bool>(false);
        CLI::Option* opt = app->add_flag(flag, *value, help);
        setters_.push_back([opt, key](json& j) {
            if (opt->count() != 0) j[key] = true;
        });
    }

    [[nodiscard]] json collect() const {
        json j = json::object();
        for (const auto& s : setters_) s(j);
        return j;
    }

private:
    std::vector<std::function<void(json&)>> setters_;
};

void add_common(CLI::App* app, FlagTable& t, std::string& config_path) {
    app->add_option("--config", config_path, "JSON config file (flags override it)");
    t.add<std::string>(app, "--out", "", "out", "output directory");
    t.add<std::vector<std::string>>(app, "--format", "", "formats", "output formats: csv,json,svg")
        ->delimiter(',');
    t.add<std::uint64_t>(app, "--seed", "", "seed", "master seed");
}

void add_graph(CLI::App* app, FlagTable& t) {
    t.add<std::string>(app, "--kind", "graph", "kind",
                       "er|ba|powerlaw-config|ring-lattice|watts-strogatz|random-geometric|star|path|cycle|complete|file");
    t.add<int>(app, "--n", "graph", "n", "node count");
    t.add<double>(app, "--p", "graph", "p", "ER edge probability");
    t.add<int>(app, "--m", "graph", "m", "BA edges per new node");
    t.add<double>(app, "--gamma", "graph", "gamma", "power-law exponent");
    t.add<int>(app, "--k-min", "graph", "k_min", "power-law minimum degree");
    t.add<int>(app, "--lattice-k", "graph", "lattice_k", "ring lattice neighbours per side");
    t.add<double>(app, "--rewire", "graph", "rewire", "Watts-Strogatz rewiring probability");
    t.add<double>(app, "--radius", "graph", "radius", "random geometric radius");
    t.add<std::string>(app, "--path", "graph", "path", "edge-list file (kind file)");
    t.add<std::string>(app, "--file-weights", "graph", "file_weights", "from_file|constant");
    t.add<std::string>(app, "--weights", "graph", "weights", "constant|uniform");
}

void add_dynamics(CLI::App* app, FlagTable& t) {
    t.add<int>(app, "--order", "dynamics", "order", "1 or 2");
    t.add<double>(app, "--omega-n", "dynamics", "omega_n", "natural frequency");
    t.add<double>(app, "--zeta", "dynamics", "zeta", "damping ratio");
    t.add<double>(app, "--gain", "dynamics", "k", "coupling gain k (default (1 - margin) / lambda_1)");
    t.add<double>(app, "--margin", "dynamics", "margin", "safety margin for the default gain");
    t.add<std::vector<double>>(app, "--g-coeffs", "dynamics", "g_coeffs", "custom g(s), ascending powers")
        ->delimiter(',');
}

void add_grid(CLI::App* app, FlagTable& t) {
    t.add<double>(app, "--w-min", "grid", "w_min", "lowest frequency");
    t.add<double>(app, "--w-max", "grid", "w_max", "highest frequency");
    t.add<int>(app, "--points", "grid", "points", "log-spaced grid points");
}

json read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    json j = json::parse(in);
    if (!j.is_object()) throw InvalidArgument("config file must hold a JSON object");
    return j;
}

void write_manifest(Outputs& out, const std::string& command, const json& cfg, int code, const std::string& error) {
    json m = {{"command", command},
              {"config", cfg},
              {"seed", cfg.at("seed")},
              {"versions", versions()},
              {"exit_code", code},
              {"artifacts", out.artifacts()}};
    if (!error.empty()) m["error"] = error;
    fs::create_directories(out.dir());
    std::ofstream f(out.dir() / "manifest.json", std::ios::binary);
    f << m.dump(2) << '\n';
}

}  // namespace

json resolve_config(const json& file_config, const json& flag_overrides, const char* env_seed) {
    json cfg = file_config.is_null() ? json::object() : file_config;
    if (env_seed != nullptr && *env_seed != '\0') cfg["seed"] = parse_seed(env_seed);
    cfg.merge_patch(flag_overrides);
    if (!cfg.contains("seed")) cfg["seed"] = std::uint64_t{0};
    if (!cfg.contains("out")) cfg["out"] = ".";
    if (!cfg.contains("formats")) cfg["formats"] = {"csv", "json", "svg"};
    check_keys(cfg, "top level", {"seed", "out", "formats", "graph", "dynamics", "grid", "scaling", "sim", "classify",
                     "per_node"});
    const json& seed = cfg.at("seed");
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0))
        throw InvalidArgument("seed must be a non-negative integer");
    cfg["seed"] = seed.get<std::uint64_t>();
    return cfg;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dynamic sensitivity of linearly coupled networks", "netsense"};
    app.set_version_flag("--version", NETSENSE_VERSION);
    app.require_subcommand(1);

    struct Sub {
        CLI::App* app;
        FlagTable flags;
        std::string config;
        int (*handler)(const json&, Outputs&, std::ostream&);
    };
    std::map<std::string, Sub> subs;
    auto make = [&](const std::string& name, const std::string& help, auto handler) -> Sub& {
        Sub& s = subs[name];
        s.app = app.add_subcommand(name, help);
        s.handler = handler;
        add_common(s.app, s.flags, s.config);
        add_graph(s.app, s.flags);
        return s;
    };

    make("gen", "generate or load a graph; writes an edge list and stats", cmd_gen);
    {
        Sub& s = make("sweep", "mean and node sensitivity over a frequency grid", cmd_sweep);
        add_dynamics(s.app, s.flags);
        add_grid(s.app, s.flags);
        s.flags.add_switch(s.app, "--per-node", "per_node", "include per-node magnitude and phase columns");
        s.flags.add<double>(s.app, "--prominence-db", "classify", "prominence_db", "peak prominence threshold");
    }
    {
        Sub& s = make("correlate", "degree vs response magnitude correlation and crossover", cmd_correlate);
        add_dynamics(s.app, s.flags);
        add_grid(s.app, s.flags);
    }
    {
        Sub& s = make("scaling", "leading spectral weight vs network size and class verdict", cmd_scaling);
        add_dynamics(s.app, s.flags);
        add_grid(s.app, s.flags);
        s.flags.add<std::vector<int>>(s.app, "--sizes", "scaling", "sizes", "network sizes")->delimiter(',');
        s.flags.add<int>(s.app, "--trials", "scaling", "trials", "graphs per size");
        s.flags.add<std::string>(s.app, "--mode", "scaling", "mode", "er|sf (default from kind)");
        s.flags.add<int>(s.app, "--classify-n", "scaling", "classify_n", "size of the swept family member");
        s.flags.add<double>(s.app, "--max-slope", "classify", "max_slope", "class II: largest allowed slope");
        s.flags.add<double>(s.app, "--min-r2", "classify", "min_r_squared", "class II: smallest allowed R^2");
        s.flags.add<int>(s.app, "--min-band", "classify", "min_band", "class II: residue band length");
        s.flags.add<double>(s.app, "--prominence-db", "classify", "prominence_db", "peak prominence threshold");
    }
    {
        Sub& s = make("simulate", "time-domain simulation checked against node sensitivity", cmd_simulate);
        add_dynamics(s.app, s.flags);
        s.flags.add<std::vector<double>>(s.app, "--omega", "sim", "omegas", "forcing frequencies")->delimiter(',');
        s.flags.add<double>(s.app, "--amplitude", "sim", "amplitude", "forcing amplitude");
        s.flags.add<double>(s.app, "--dt", "sim", "dt", "step size (default from dynamics)");
        s.flags.add<double>(s.app, "--t-end", "sim", "t_end", "horizon (default from decay rate)");
        s.flags.add<int>(s.app, "--decimation", "sim", "decimation", "keep every n-th trajectory sample");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    const auto it = std::find_if(subs.begin(), subs.end(), [](const auto& kv) { return kv.second.app->parsed(); });
    Sub& sub = it->second;
    json cfg;
    try {
        const json file = sub.config.empty() ? json::object() : read_config_file(sub.config);
        cfg = resolve_config(file, sub.flags.collect(), std::getenv("NETSENSE_SEED"));
    } catch (const std::exception& e) {
        err << "netsense: config error: " << e.what() << '\n';
        return kUsage;
    }

    std::unique_ptr<Outputs> outputs;
    int code = kOk;
    std::string error;
    try {
        outputs = std::make_unique<Outputs>(cfg);
        code = sub.handler(cfg, *outputs, out);
    } catch (const UnstableError& e) {
        err << "netsense: " << e.what() << "\n  lambda = " << format_double(e.lambda())
            << ", margin = " << format_double(e.margin()) << '\n';
        code = kUnstable;
        error = e.what();
    } catch (const DivergenceError& e) {
        err << "netsense: " << e.what() << '\n';
        code = kUnstable;
        error = e.what();
    } catch (const PoleError& e) {
        err << "netsense: " << e.what() << '\n';
        code = kUnstable;
        error = e.what();
    } catch (const UndefinedStatistic& e) {
        err << "netsense: " << e.what() << '\n';
        code = kUndefined;
        error = e.what();
    } catch (const std::exception& e) {
        err << "netsense: " << e.what() << '\n';
        code = kUsage;
        error = e.what();
    }
    if (outputs) {
        try {
            write_manifest(*outputs, it->first, cfg, code, error);
        } catch (const std::exception& e) {
            err << "netsense: cannot write manifest: " << e.what() << '\n';
            if (code == kOk) code = kUsage;
        }
    }
    return code;
}

}  // namespace netsense::cli
