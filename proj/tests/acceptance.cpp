// Acceptance suite: one PASS/FAIL line per criterion.
//
//   netsense_acceptance              run every criterion
//   netsense_acceptance --only 3     run a single criterion
//   netsense_acceptance --out DIR    also write the CSV artifacts of criteria 1-5

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "netsense/analysis.hpp"
#include "netsense/dynamics.hpp"
#include "netsense/error.hpp"
#include "netsense/graph.hpp"
#include "netsense/rng.hpp"
#include "netsense/sensitivity.hpp"
#include "netsense/simulate.hpp"
#include "netsense/spectral.hpp"
#include "oracles.hpp"

using namespace netsense;

namespace {

constexpr std::uint64_t kMasterSeed = 20240611;
const Complex I(0.0, 1.0);

struct Outcome {
    bool pass = false;
    std::string detail;
    std::vector<std::pair<std::string, std::string>> artifacts;  // file name, CSV bytes
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Largest |sum_i w_i - 1| over every decomposition made by the suite.
double g_weight_sum_error = 0.0;
int g_decompositions = 0;

SpectralDecomposition tracked_decompose(const InteractionMatrix& a) {
    auto dec = decompose(a);
    g_weight_sum_error = std::max(g_weight_sum_error, std::abs(dec.weights.sum() - 1.0));
    ++g_decompositions;
    return dec;
}

NodalDynamics reference_oscillator() { return NodalDynamics::second_order(std::sqrt(2.0), 0.05, 0.37949); }

FrequencyGrid reference_grid() { return FrequencyGrid::log_spaced(0.05, 50.0, 400); }

std::string sweep_csv(const FrequencySweep& sw) {
    std::ostringstream out;
    write_sweep_csv(out, sw);
    return out.str();
}

std::string scaling_csv(const ScalingResult& r) {
    std::ostringstream out;
    write_scaling_csv(out, r);
    return out.str();
}

std::string correlation_csv(const CorrelationCurve& c) {
    std::ostringstream out;
    write_correlation_csv(out, c);
    return out.str();
}

GraphParams params_of(GraphKind kind, int n, std::uint64_t seed) {
    GraphParams s;
    s.kind = kind;
    s.n = n;
    s.seed = seed;
    return s;
}

// ---- 1 ---------------------------------------------------------------------------------

Outcome criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    auto s = params_of(GraphKind::er, 2048, derive_seed(kMasterSeed, {1}));
    s.p = 0.005;
    const InteractionMatrix a(generate(s));
    const auto dec = tracked_decompose(a);
    const auto dyn = reference_oscillator();
    const auto sw = sweep(a, dec, dyn, reference_grid());
    double worst = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < sw.grid.size(); ++i) {
        const Complex limit = closed_loop_limit_eval(dyn, sw.grid[i] * I);
        worst = std::max(worst, std::abs(sw.mean_response[i] - limit));
        scale = std::max(scale, std::abs(limit));
    }
    const double rel = worst / scale;
    const int peaks = count_peaks(sw);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Outcome o;
    o.pass = rel <= 0.15 && peaks == 1;
    o.detail = "ER n=2048 p=0.005: max rel deviation from f/(1-f) " + fmt("%.4f", rel) + " (<= 0.15), peaks " +
               std::to_string(peaks) + " (== 1), lambda_1 " + fmt("%.4f", dec.eigenvalues(0)) + ", " +
               fmt("%.1f", secs) + " s";
    o.artifacts.emplace_back("criterion1_sweep.csv", sweep_csv(sw));
    return o;
}

// ---- 2 ---------------------------------------------------------------------------------

Outcome criterion_2() {
    auto s = params_of(GraphKind::ba, 2048, derive_seed(kMasterSeed, {2}));
    s.m = 5;
    const InteractionMatrix a(generate(s));
    const auto dec = tracked_decompose(a);
    const auto sw = sweep(a, dec, reference_oscillator(), reference_grid());
    const auto peaks = find_peaks(sw);
    const int band = peaks.empty() ? 0 : longest_residue_band(sw, peaks.front() + 1);
    Outcome o;
    o.pass = peaks.size() == 2 && band >= 10;
    std::string where;
    for (auto i : peaks) where += (where.empty() ? "" : ", ") + fmt("%.3f", sw.grid[i]);
    o.detail = "BA n=2048 m=5: peaks " + std::to_string(peaks.size()) + " (== 2) at omega {" + where +
               "}, residue-dominated band above first peak " + std::to_string(band) + " points (>= 10)";
    o.artifacts.emplace_back("criterion2_sweep.csv", sweep_csv(sw));
    return o;
}

// ---- 3, 4 ------------------------------------------------------------------------------

const std::vector<int> kScalingSizes{256, 512, 1024, 2048, 4096};

Outcome criterion_3() {
    GraphParams family;
    family.kind = GraphKind::er;
    family.p = 0.02;
    family.seed = derive_seed(kMasterSeed, {3});
    const auto r = weight_scaling(family, kScalingSizes, 10, ScalingMode::er);
    Outcome o;
    o.pass = r.fit.slope >= -0.65 && r.fit.slope <= -0.35 && r.fit.r_squared >= 0.8;
    o.detail = "ER p=0.02: slope of log(1 - w1) vs log N " + fmt("%.4f", r.fit.slope) + " (in [-0.65, -0.35]), R^2 " +
               fmt("%.4f", r.fit.r_squared) + " (>= 0.8), excluded trials " + std::to_string(r.excluded);
    o.artifacts.emplace_back("criterion3_scaling.csv", scaling_csv(r));
    return o;
}

Outcome criterion_4() {
    GraphParams family;
    family.kind = GraphKind::ba;
    family.m = 5;
    family.seed = derive_seed(kMasterSeed, {4});
    const auto r = weight_scaling(family, kScalingSizes, 10, ScalingMode::sf);
    Outcome o;
    o.pass = r.fit.slope >= -0.7 && r.fit.slope <= -0.3 && r.fit.r_squared >= 0.7;
    o.detail = "BA m=5: slope of log w1 vs log N " + fmt("%.4f", r.fit.slope) + " (in [-0.7, -0.3]), R^2 " +
               fmt("%.4f", r.fit.r_squared) + " (>= 0.7), median w1 " + fmt("%.3f", r.w1_median.front()) + " -> " +
               fmt("%.3f", r.w1_median.back());
    o.artifacts.emplace_back("criterion4_scaling.csv", scaling_csv(r));
    return o;
}

// ---- 5 ---------------------------------------------------------------------------------

Outcome criterion_5() {
    auto s = params_of(GraphKind::er, 500, derive_seed(kMasterSeed, {5}));
    s.p = 0.04;
    s.weights = WeightDist::uniform;
    const auto g = generate(s);
    const InteractionMatrix a(g);
    const auto dec = tracked_decompose(a);
    const double lam1 = dec.eigenvalues(0);

    // Log grid over [0.1, 10] with the two probe frequencies inserted exactly.
    auto base = FrequencyGrid::log_spaced(0.1, 10.0, 400);
    std::vector<double> w(base.omegas().begin(), base.omegas().end());
    for (double probe : {0.5, 2.0})
        if (std::find(w.begin(), w.end(), probe) == w.end()) w.push_back(probe);
    std::sort(w.begin(), w.end());
    const auto grid = FrequencyGrid::from_values(w);
    const auto at = [&](const CorrelationCurve& c, double omega) {
        const auto it = std::find(c.omegas.begin(), c.omegas.end(), omega);
        return c.spearman[static_cast<std::size_t>(it - c.omegas.begin())];
    };

    const auto second = NodalDynamics::second_order(1.0, 0.01, 0.9 / lam1);
    const auto c2 = degree_correlation(g, sweep(a, dec, second, grid));
    const double r_low = at(c2, 0.5);
    const double r_high = at(c2, 2.0);
    const auto x = find_crossover(c2);

    const auto first = NodalDynamics::first_order(1.0, 0.5 * 0.9 / lam1);
    const auto c1 = degree_correlation(g, sweep(a, dec, first, grid));
    const double min_first = *std::min_element(c1.spearman.begin(), c1.spearman.end());

    Outcome o;
    o.pass = r_low >= 0.5 && r_high <= -0.3 && x && *x >= 0.5 && *x <= 2.0 && min_first > 0.0;
    o.detail = "ER n=500: spearman(0.5) " + fmt("%.3f", r_low) + " (>= 0.5), spearman(2.0) " + fmt("%.3f", r_high) +
               " (<= -0.3), crossover " + (x ? fmt("%.3f", *x) : std::string("none")) +
               " (in [0.5, 2]), first-order min spearman " + fmt("%.3f", min_first) + " (> 0)";
    o.artifacts.emplace_back("criterion5_second_order.csv", correlation_csv(c2));
    o.artifacts.emplace_back("criterion5_first_order.csv", correlation_csv(c1));
    return o;
}

// ---- 6 ---------------------------------------------------------------------------------

WeightedGraph mixed_graph(int index, Rng& rng) {
    const auto seed = derive_seed(kMasterSeed, {6, static_cast<std::uint64_t>(index)});
    const int n = 20 + static_cast<int>(uniform_index(rng, 181));  // 20..200
    GraphParams s = params_of(GraphKind::er, n, seed);
    s.weights = index % 2 == 0 ? WeightDist::uniform : WeightDist::constant;
    switch (index % 6) {
        case 0:
            s.p = 0.05 + 0.1 * uniform01(rng);
            break;
        case 1:
            s.kind = GraphKind::ba;
            s.m = 1 + static_cast<int>(uniform_index(rng, 4));
            break;
        case 2:
            s.kind = GraphKind::watts_strogatz;
            s.k = 2;
            s.rewire = 0.2;
            break;
        case 3:
            s.kind = GraphKind::random_geometric;
            s.radius = 0.2;
            break;
        case 4:
            s.kind = GraphKind::powerlaw_config;
            s.gamma = 2.5;
            s.k_min = 2;
            break;
        default:
            s.kind = GraphKind::ring_lattice;
            s.k = 3;
            break;
    }
    return generate(s);
}

Outcome criterion_6() {
    Rng rng(derive_seed(kMasterSeed, {6}));
    const auto grid = FrequencyGrid::log_spaced(0.1, 10.0, 20);
    double worst = 0.0;
    int graphs = 0;
    for (int gi = 0; gi < 50; ++gi) {
        const auto g = mixed_graph(gi, rng);
        if (g.edge_count() == 0) continue;
        const InteractionMatrix a(g);
        const auto dec = tracked_decompose(a);
        const auto dyn = NodalDynamics::second_order(1.0, 0.05, 0.9 / dec.eigenvalues(0));
        for (double w : grid.omegas()) {
            const Complex direct = mean_sensitivity_direct(a, dyn, w);
            const Complex spectral = mean_sensitivity_spectral(dec, dyn, w).total;
            worst = std::max(worst, std::abs(spectral - direct) / std::abs(direct));
        }
        ++graphs;
    }
    double worst_small = 0.0;
    for (int n = 2; n <= 8; ++n) {
        const auto g = oracle::random_graph(n, 0.6, derive_seed(kMasterSeed, {6, 100, static_cast<std::uint64_t>(n)}),
                                            true);
        const InteractionMatrix a(g);
        const auto dyn = NodalDynamics::second_order(1.0, 0.05, 0.5);
        for (double w : grid.omegas()) {
            Eigen::MatrixXcd m = -a.dense().cast<Complex>();
            m.diagonal().array() += dyn.g(w * I);
            const Eigen::VectorXcd expected = oracle::gauss_jordan_inverse(m) * Eigen::VectorXcd::Ones(n);
            const Eigen::VectorXcd x = node_sensitivity(a, dyn, w);
            worst_small = std::max(worst_small, (x - expected).cwiseAbs().maxCoeff());
        }
    }
    Outcome o;
    o.pass = graphs == 50 && worst <= 1e-8 && worst_small <= 1e-10;
    o.detail = std::to_string(graphs) + " graphs x 20 frequencies: max |spectral - direct|/|direct| " +
               fmt("%.2e", worst) + " (<= 1e-8); brute-force inverse n<=8 max diff " + fmt("%.2e", worst_small) +
               " (<= 1e-10)";
    return o;
}

// ---- 7 ---------------------------------------------------------------------------------

double wrap_deg(double d) {
    d = std::fmod(d + 180.0, 360.0);
    if (d < 0.0) d += 360.0;
    return d - 180.0;
}

Outcome criterion_7() {
    std::vector<std::pair<std::string, WeightedGraph>> graphs;
    graphs.emplace_back("star K_{1,5}", generate(params_of(GraphKind::star, 6, 0)));
    auto s = params_of(GraphKind::er, 32, derive_seed(kMasterSeed, {7}));
    s.p = 0.2;
    s.weights = WeightDist::uniform;
    graphs.emplace_back("ER n=32", generate(s));

    const double omega_n = 1.0;
    const auto freqs = FrequencyGrid::log_spaced(omega_n / 4.0, 4.0 * omega_n, 5);
    double worst_amp = 0.0;
    double worst_phase = 0.0;
    bool steady = true;
    for (const auto& [name, g] : graphs) {
        const InteractionMatrix a(g);
        const auto dec = tracked_decompose(a);
        const auto dyn = NodalDynamics::second_order(omega_n, 0.01, 0.9 / dec.eigenvalues(0));
        const double decay = std::min(is_stable(dyn, dec.eigenvalues(0)).margin,
                                      is_stable(dyn, dec.eigenvalues(dec.n() - 1)).margin);
        for (double w : freqs.omegas()) {
            const auto cfg = recommended_sim_config(dyn, decay, {w, 1.0});
            const auto ss = steady_state(simulate_forced(a, dyn, cfg), w);
            steady = steady && ss.steady;
            const Eigen::VectorXcd x = node_sensitivity(a, dyn, w);
            for (int i = 0; i < a.n(); ++i) {
                const auto k = static_cast<std::size_t>(i);
                worst_amp = std::max(worst_amp, std::abs(ss.amplitude[k] - std::abs(x(i))) / std::abs(x(i)));
                worst_phase = std::max(worst_phase,
                                       std::abs(wrap_deg((ss.phase[k] - std::arg(x(i))) * 180.0 / std::numbers::pi)));
            }
        }
    }
    Outcome o;
    o.pass = worst_amp <= 0.02 && worst_phase <= 2.0;
    o.detail = "star K_{1,5} and ER n=32, 5 frequencies: max amplitude error " + fmt("%.4f", 100.0 * worst_amp) +
               "% (<= 2%), max phase error " + fmt("%.4f", worst_phase) + " deg (<= 2)" +
               (steady ? "" : ", some fits not steady");
    return o;
}

// ---- 8 ---------------------------------------------------------------------------------

Outcome criterion_8() {
    double worst_w1 = 0.0;
    double worst_residue = 0.0;
    double worst_mean = 0.0;
    const auto dyn = reference_oscillator();
    for (int n : {4, 16, 64}) {
        const InteractionMatrix a(generate(params_of(GraphKind::complete, n, 0)));
        const auto dec = tracked_decompose(a);
        worst_w1 = std::max(worst_w1, std::abs(dec.weights(0) - 1.0));
        worst_residue = std::max(worst_residue, std::abs(dec.residue));
        const auto sw = sweep(a, dec, dyn, reference_grid());
        for (std::size_t i = 0; i < sw.grid.size(); ++i) {
            const Complex expected = 1.0 / (dyn.g(sw.grid[i] * I) - 1.0);
            worst_mean = std::max(worst_mean, std::abs(sw.mean_response[i] - expected) / std::abs(expected));
        }
    }
    // A battery of other families so the weight-sum check sees varied spectra.
    Rng rng(derive_seed(kMasterSeed, {8}));
    for (int gi = 0; gi < 12; ++gi) {
        const auto g = mixed_graph(100 + gi, rng);
        if (g.edge_count() > 0) (void)tracked_decompose(InteractionMatrix(g));
    }
    for (auto kind : {GraphKind::star, GraphKind::path, GraphKind::cycle})
        (void)tracked_decompose(InteractionMatrix(generate(params_of(kind, 33, 0))));

    Outcome o;
    o.pass = worst_w1 <= 1e-12 && worst_residue <= 1e-12 && worst_mean <= 1e-9 && g_weight_sum_error <= 1e-10;
    o.detail = "K_4, K_16, K_64: max |w1 - 1| " + fmt("%.1e", worst_w1) + ", max |R| " + fmt("%.1e", worst_residue) +
               " (<= 1e-12), max rel |S - 1/(g-1)| " + fmt("%.1e", worst_mean) + " (<= 1e-9); max |sum w - 1| " +
               fmt("%.1e", g_weight_sum_error) + " over " + std::to_string(g_decompositions) +
               " decompositions (<= 1e-10)";
    return o;
}

// ---- 9 ---------------------------------------------------------------------------------

Outcome criterion_9() {
    const InteractionMatrix a(generate(params_of(GraphKind::star, 10, 0)));
    const auto dec = tracked_decompose(a);
    const auto dyn = NodalDynamics::second_order(1.0, 0.01, 0.9 / dec.eigenvalues(0));
    const auto sw = sweep(a, dec, dyn, FrequencyGrid::default_for(1.0));
    double leaf_spread = 0.0;
    for (Eigen::Index c = 0; c < sw.node_response.cols(); ++c)
        for (Eigen::Index i = 2; i < 10; ++i)
            leaf_spread = std::max(leaf_spread, std::abs(sw.node_response(i, c) - sw.node_response(1, c)));
    const Eigen::VectorXcd low = node_sensitivity(a, dyn, 0.5);
    const Eigen::VectorXcd high = node_sensitivity(a, dyn, 3.0);
    for (const auto* x : {&low, &high})
        for (Eigen::Index i = 2; i < 10; ++i) leaf_spread = std::max(leaf_spread, std::abs((*x)(i) - (*x)(1)));
    const bool hub_low = std::abs(low(0)) > std::abs(low(1));
    const bool hub_high = std::abs(high(0)) < std::abs(high(1));
    Outcome o;
    o.pass = leaf_spread <= 1e-10 && hub_low && hub_high;
    o.detail = "star K_{1,9}: max leaf difference " + fmt("%.1e", leaf_spread) + " (<= 1e-10), |hub|/|leaf| at 0.5 " +
               fmt("%.3f", std::abs(low(0)) / std::abs(low(1))) + " (> 1), at 3.0 " +
               fmt("%.3f", std::abs(high(0)) / std::abs(high(1))) + " (< 1)";
    return o;
}

// ---- 10 --------------------------------------------------------------------------------

using Criterion = std::function<Outcome()>;

Outcome criterion_10(const std::vector<Criterion>& reproducible) {
    std::vector<std::string> mismatched;
    std::size_t files = 0;
    for (std::size_t c = 0; c < reproducible.size(); ++c) {
        const auto first = reproducible[c]();
        const auto second = reproducible[c]();
        if (first.artifacts.size() != second.artifacts.size()) {
            mismatched.push_back("criterion " + std::to_string(c + 1));
            continue;
        }
        for (std::size_t i = 0; i < first.artifacts.size(); ++i) {
            ++files;
            if (first.artifacts[i].second != second.artifacts[i].second) mismatched.push_back(first.artifacts[i].first);
        }
    }
    Outcome o;
    o.pass = mismatched.empty() && files > 0;
    o.detail = "re-ran criteria 1-5: " + std::to_string(files) + " CSV files, " + std::to_string(mismatched.size()) +
               " differ";
    for (const auto& m : mismatched) o.detail += " [" + m + "]";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"netsense acceptance criteria"};
    int only = 0;
    std::string out_dir;
    app.add_option("--only", only, "run a single criterion (1-10)")->check(CLI::Range(1, 10));
    app.add_option("--out", out_dir, "write CSV artifacts of criteria 1-5 here");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> reproducible{criterion_1, criterion_2, criterion_3, criterion_4, criterion_5};
    const std::vector<std::pair<int, Criterion>> all{
        {1, criterion_1}, {2, criterion_2}, {3, criterion_3}, {4, criterion_4},
        {5, criterion_5}, {6, criterion_6}, {7, criterion_7}, {9, criterion_9},
        {10, [&] { return criterion_10(reproducible); }},
        {8, criterion_8},  // last, so its weight-sum check covers every decomposition above
    };

    int failures = 0;
    for (const auto& [id, run] : all) {
        if (only != 0 && id != only) continue;
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("threw: ") + e.what();
        }
        if (!out_dir.empty()) {
            std::filesystem::create_directories(out_dir);
            for (const auto& [name, bytes] : o.artifacts)
                std::ofstream(std::filesystem::path(out_dir) / name, std::ios::binary) << bytes;
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << o.detail << std::endl;
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
