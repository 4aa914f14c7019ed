#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "netsense/graph.hpp"
#include "netsense/sensitivity.hpp"

namespace netsense {

// ---- rank statistics ------------------------------------------------------------------

/// 1-based ranks; tied values receive the average of the ranks they span.
[[nodiscard]] std::vector<double> average_ranks(std::span<const double> values);
/// Pearson correlation. Throws UndefinedStatistic if either input is constant.
[[nodiscard]] double pearson(std::span<const double> x, std::span<const double> y);
/// Spearman rank correlation (Pearson on average ranks).
[[nodiscard]] double spearman(std::span<const double> x, std::span<const double> y);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;  // 1 when y is constant and fitted exactly
};

[[nodiscard]] LinearFit ols(std::span<const double> x, std::span<const double> y);

// ---- degree vs response magnitude -----------------------------------------------------

struct CorrelationCurve {
    std::vector<double> omegas;
    std::vector<double> spearman;
    std::vector<double> pearson;
};

/// Per-frequency correlation between node degree and |S_N(i omega)|. Throws
/// UndefinedStatistic for a constant degree sequence. At a frequency where every node
/// responds with the same magnitude the correlation is reported as 0.
[[nodiscard]] CorrelationCurve degree_correlation(const WeightedGraph& graph, const FrequencySweep& sw);

/// Smallest frequency where the Spearman curve goes from positive to negative and stays
/// negative for `persistence` consecutive points, linearly interpolated between the
/// bracketing grid points.
[[nodiscard]] std::optional<double> find_crossover(const CorrelationCurve& curve, int persistence = 5);

void write_correlation_csv(std::ostream& out, const CorrelationCurve& curve);
[[nodiscard]] nlohmann::json to_json(const CorrelationCurve& curve);

// ---- spectral weight scaling ----------------------------------------------------------

enum class ScalingMode {
    er,  // regress log(1 - w_1) on log N
    sf,  // regress log w_1 on log N
};

[[nodiscard]] ScalingMode parse_scaling_mode(std::string_view name);
[[nodiscard]] std::string_view to_string(ScalingMode mode);

struct ScalingResult {
    GraphParams family;
    ScalingMode mode = ScalingMode::sf;
    std::vector<int> sizes;
    std::vector<std::vector<double>> w1;     // [size][trial]
    std::vector<double> w1_median;           // per size
    std::vector<double> regressed_median;    // median of 1 - w_1 (er) or w_1 (sf), kept trials
    std::size_t excluded = 0;                // er mode: trials with w_1 >= 1
    LinearFit fit;                           // natural logs on both axes
};

/// For every size, generates `trials` graphs of the family with seeds derived from
/// (family.seed, N, trial), records the leading spectral weight and fits a power law to
/// the per-size medians.
[[nodiscard]] ScalingResult weight_scaling(const GraphParams& family, std::span<const int> sizes, int trials,
                                           ScalingMode mode);

void write_scaling_csv(std::ostream& out, const ScalingResult& r);
[[nodiscard]] nlohmann::json to_json(const ScalingResult& r);

// ---- peaks and classification ---------------------------------------------------------

/// Indices of strict local maxima of |mean response| in dB whose topographic prominence
/// (height above the higher of the two flanking minima) is at least `prominence_db`.
[[nodiscard]] std::vector<std::size_t> find_peaks(const FrequencySweep& sw, double prominence_db = 3.0);
[[nodiscard]] int count_peaks(const FrequencySweep& sw, double prominence_db = 3.0);

/// Longest run of consecutive grid points with |residue_part| > |first_mode|, counted at
/// or above grid index `from`.
[[nodiscard]] int longest_residue_band(const FrequencySweep& sw, std::size_t from = 0);

/// Artifact-chosen decision thresholds.
struct ClassThresholds {
    double max_slope = -0.2;
    double min_r_squared = 0.8;
    int min_band = 10;
    double prominence_db = 3.0;
};

enum class SensitivityClass { I, II, inconclusive };

[[nodiscard]] std::string_view to_string(SensitivityClass c);

struct ClassEvidence {
    ScalingMode mode = ScalingMode::sf;
    double slope = 0.0;
    double r_squared = 0.0;
    double w1_trend = 0.0;  // OLS slope of median w_1 against log N
    double w1_limit = 0.0;  // median w_1 at the largest size
    int residue_band = 0;
    int peak_count = 0;
};

struct ClassVerdict {
    SensitivityClass cls = SensitivityClass::inconclusive;
    ClassEvidence evidence;
};

/// Class II: sf-mode slope <= max_slope with R^2 >= min_r_squared and a residue-dominated
/// band of >= min_band points above the first peak. Class I: median w_1 non-decreasing in
/// N and a single peak. Anything else is inconclusive.
[[nodiscard]] ClassVerdict classify_evidence(const ClassEvidence& evidence, const ClassThresholds& t = {});
[[nodiscard]] ClassVerdict classify(const ScalingResult& scaling, const FrequencySweep& sw,
                                    const ClassThresholds& t = {});
[[nodiscard]] nlohmann::json to_json(const ClassVerdict& v);

}  // namespace netsense
