#include "netsense/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "netsense/error.hpp"
#include "netsense/format.hpp"
#include "netsense/rng.hpp"
#include "netsense/spectral.hpp"

namespace netsense {

namespace {

double median(std::vector<double> v) {
    if (v.empty()) throw UndefinedStatistic("median of an empty sample");
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

bool is_constant(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i + 1;
        while (j < n && values[idx[j]] == values[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1 .. j
        for (std::size_t k = i; k < j; ++k) ranks[idx[k]] = avg;
        i = j;
    }
    return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("pearson: need two samples of equal size >= 2");
    if (is_constant(x) || is_constant(y)) throw UndefinedStatistic("correlation against a constant sample");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

LinearFit ols(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("ols: need at least two points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw UndefinedStatistic("ols: abscissae are all equal");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

CorrelationCurve degree_correlation(const WeightedGraph& graph, const FrequencySweep& sw) {
    if (sw.node_response.rows() != graph.n()) throw InvalidArgument("degree_correlation: graph and sweep sizes differ");
    std::vector<double> degree(graph.degree().begin(), graph.degree().end());
    if (degree.size() < 2 || is_constant(degree))
        throw UndefinedStatistic("degree correlation is undefined for a constant degree sequence");

    CorrelationCurve curve;
    std::vector<double> mag(degree.size());
    for (std::size_t w = 0; w < sw.grid.size(); ++w) {
        for (std::size_t i = 0; i < mag.size(); ++i)
            mag[i] = std::abs(sw.node_response(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(w)));
        curve.omegas.push_back(sw.grid[w]);
        if (is_constant(mag)) {
            curve.spearman.push_back(0.0);
            curve.pearson.push_back(0.0);
        } else {
            curve.spearman.push_back(spearman(degree, mag));
            curve.pearson.push_back(pearson(degree, mag));
        }
    }
    return curve;
}

std::optional<double> find_crossover(const CorrelationCurve& curve, int persistence) {
    const auto& s = curve.spearman;
    const std::size_t need = static_cast<std::size_t>(std::max(1, persistence));
    for (std::size_t i = 1; i + need <= s.size(); ++i) {
        if (!(s[i - 1] > 0.0 && s[i] < 0.0)) continue;
        bool persists = true;
        for (std::size_t j = i; j < i + need; ++j) persists = persists && s[j] < 0.0;
        if (!persists) continue;
        const double w0 = curve.omegas[i - 1];
        const double w1 = curve.omegas[i];
        const double t = s[i - 1] / (s[i - 1] - s[i]);
        return w0 + t * (w1 - w0);
    }
    return std::nullopt;
}

void write_correlation_csv(std::ostream& out, const CorrelationCurve& curve) {
    out << "omega,spearman,pearson\n";
    for (std::size_t i = 0; i < curve.omegas.size(); ++i)
        out << format_double(curve.omegas[i]) << ',' << format_double(curve.spearman[i]) << ','
            << format_double(curve.pearson[i]) << '\n';
}

nlohmann::json to_json(const CorrelationCurve& curve) {
    return {{"omegas", curve.omegas}, {"spearman", curve.spearman}, {"pearson", curve.pearson}};
}

ScalingMode parse_scaling_mode(std::string_view name) {
    if (name == "er") return ScalingMode::er;
    if (name == "sf") return ScalingMode::sf;
    throw InvalidArgument("unknown scaling mode '" + std::string(name) + "'");
}

std::string_view to_string(ScalingMode mode) { return mode == ScalingMode::er ? "er" : "sf"; }

ScalingResult weight_scaling(const GraphParams& family, std::span<const int> sizes, int trials, ScalingMode mode) {
    if (sizes.size() < 3) throw InvalidArgument("weight_scaling: need at least 3 sizes");
    if (trials < 5) throw InvalidArgument("weight_scaling: need at least 5 trials per size");
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (!(sizes[i] > sizes[i - 1])) throw InvalidArgument("weight_scaling: sizes must be strictly increasing");

    ScalingResult r;
    r.family = family;
    r.mode = mode;
    r.sizes.assign(sizes.begin(), sizes.end());
    std::vector<double> log_n;
    std::vector<double> log_y;
    for (int n : sizes) {
        std::vector<double> w1s;
        std::vector<double> regressed;
        for (int t = 0; t < trials; ++t) {
            GraphParams params = family;
            params.n = n;
            params.seed = derive_seed(family.seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t)});
            const auto w1 = leading_mode(generate(params)).weight;
            w1s.push_back(w1);
            if (mode == ScalingMode::sf) {
                regressed.push_back(w1);
            } else if (1.0 - w1 > 0.0) {
                regressed.push_back(1.0 - w1);
            } else {
                ++r.excluded;
            }
        }
        r.w1_median.push_back(median(w1s));
        r.w1.push_back(std::move(w1s));
        if (regressed.empty())
            throw UndefinedStatistic("weight_scaling: every trial at N = " + std::to_string(n) +
                                     " has w_1 = 1, so log(1 - w_1) is undefined (" + std::to_string(r.excluded) +
                                     " trials excluded)");
        const double med = median(regressed);
        r.regressed_median.push_back(med);
        log_n.push_back(std::log(static_cast<double>(n)));
        log_y.push_back(std::log(med));
    }
    r.fit = ols(log_n, log_y);
    return r;
}

void write_scaling_csv(std::ostream& out, const ScalingResult& r) {
    out << "n,trial,w1\n";
    for (std::size_t s = 0; s < r.sizes.size(); ++s)
        for (std::size_t t = 0; t < r.w1[s].size(); ++t)
            out << r.sizes[s] << ',' << t << ',' << format_double(r.w1[s][t]) << '\n';
}

nlohmann::json to_json(const ScalingResult& r) {
    return {{"family", std::string(to_string(r.family.kind))},
            {"mode", std::string(to_string(r.mode))},
            {"sizes", r.sizes},
            {"w1", r.w1},
            {"w1_median", r.w1_median},
            {"regressed_median", r.regressed_median},
            {"excluded", r.excluded},
            {"slope", r.fit.slope},
            {"intercept", r.fit.intercept},
            {"r_squared", r.fit.r_squared}};
}

std::vector<std::size_t> find_peaks(const FrequencySweep& sw, double prominence_db) {
    const std::size_t n = sw.mean_response.size();
    std::vector<double> db(n);
    for (std::size_t i = 0; i < n; ++i) db[i] = magnitude_db(sw.mean_response[i]);
    std::vector<std::size_t> peaks;
    for (std::size_t p = 1; p + 1 < n; ++p) {
        if (!(db[p] > db[p - 1] && db[p] > db[p + 1])) continue;
        // Walk outwards until a strictly higher sample (or the grid edge), tracking minima.
        double left_min = db[p];
        for (std::size_t i = p; i-- > 0;) {
            if (db[i] > db[p]) break;
            left_min = std::min(left_min, db[i]);
        }
        double right_min = db[p];
        for (std::size_t i = p + 1; i < n; ++i) {
            if (db[i] > db[p]) break;
            right_min = std::min(right_min, db[i]);
        }
        if (db[p] - std::max(left_min, right_min) >= prominence_db) peaks.push_back(p);
    }
    return peaks;
}

int count_peaks(const FrequencySweep& sw, double prominence_db) {
    return static_cast<int>(find_peaks(sw, prominence_db).size());
}

int longest_residue_band(const FrequencySweep& sw, std::size_t from) {
    int best = 0;
    int run = 0;
    for (std::size_t i = from; i < sw.residue_part.size(); ++i) {
        if (std::abs(sw.residue_part[i]) > std::abs(sw.first_mode[i])) {
            best = std::max(best, ++run);
        } else {
            run = 0;
        }
    }
    return best;
}

std::string_view to_string(SensitivityClass c) {
    switch (c) {
        case SensitivityClass::I: return "I";
        case SensitivityClass::II: return "II";
        case SensitivityClass::inconclusive: return "inconclusive";
    }
    return "?";
}

ClassVerdict classify_evidence(const ClassEvidence& e, const ClassThresholds& t) {
    ClassVerdict v;
    v.evidence = e;
    const bool emergent = e.mode == ScalingMode::sf && e.slope <= t.max_slope && e.r_squared >= t.min_r_squared &&
                          e.residue_band >= t.min_band;
    const bool scalar_like = e.w1_trend >= -1e-12 && e.peak_count == 1;
    if (emergent) {
        v.cls = SensitivityClass::II;
    } else if (scalar_like) {
        v.cls = SensitivityClass::I;
    }
    return v;
}

ClassVerdict classify(const ScalingResult& scaling, const FrequencySweep& sw, const ClassThresholds& t) {
    ClassEvidence e;
    e.mode = scaling.mode;
    e.slope = scaling.fit.slope;
    e.r_squared = scaling.fit.r_squared;
    std::vector<double> log_n;
    for (int n : scaling.sizes) log_n.push_back(std::log(static_cast<double>(n)));
    e.w1_trend = ols(log_n, scaling.w1_median).slope;
    e.w1_limit = scaling.w1_median.back();
    const auto peaks = find_peaks(sw, t.prominence_db);
    e.peak_count = static_cast<int>(peaks.size());
    e.residue_band = longest_residue_band(sw, peaks.empty() ? 0 : peaks.front() + 1);
    return classify_evidence(e, t);
}

nlohmann::json to_json(const ClassVerdict& v) {
    const auto& e = v.evidence;
    return {{"class", std::string(to_string(v.cls))},
            {"evidence",
             {{"mode", std::string(to_string(e.mode))},
              {"slope", e.slope},
              {"r_squared", e.r_squared},
              {"w1_trend", e.w1_trend},
              {"w1_limit", e.w1_limit},
              {"residue_band", e.residue_band},
              {"peak_count", e.peak_count}}}};
}

}  // namespace netsense
