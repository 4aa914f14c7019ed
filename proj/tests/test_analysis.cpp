#include <cmath>
#include <sstream>

#include "doctest.h"
#include "netsense/analysis.hpp"
#include "netsense/error.hpp"
#include "oracles.hpp"

using namespace netsense;

namespace {

FrequencySweep sweep_of(GraphKind kind, int n, const NodalDynamics& d, const FrequencyGrid& grid) {
    GraphParams s;
    s.kind = kind;
    s.n = n;
    const auto a = interaction_matrix(generate(s));
    return sweep(a, decompose(a), d, grid);
}

FrequencySweep synthetic_sweep(const std::vector<double>& omegas, const std::vector<Complex>& mean) {
    FrequencySweep sw;
    sw.grid = FrequencyGrid::from_values(omegas);
    sw.mean_response = mean;
    sw.first_mode = mean;
    sw.residue_part.assign(mean.size(), 0.0);
    return sw;
}

}  // namespace

TEST_SUITE("analysis") {
    TEST_CASE("average ranks") {
        const std::vector<double> v{3.0, 1.0, 3.0, 2.0};
        CHECK(average_ranks(v) == std::vector<double>{3.5, 1.0, 3.5, 2.0});
    }

    TEST_CASE("spearman of a strictly increasing relation is 1") {
        const std::vector<double> x{1, 2, 3, 4, 5};
        const std::vector<double> y{0.1, 0.5, 0.6, 10, 100};
        CHECK(spearman(x, y) == doctest::Approx(1.0).epsilon(1e-15));
        const std::vector<double> z{5, 4, 3, 2, 1};
        CHECK(spearman(x, z) == doctest::Approx(-1.0).epsilon(1e-15));
        CHECK_THROWS_AS((void)spearman(x, std::vector<double>(5, 2.0)), UndefinedStatistic);
    }

    TEST_CASE("ordinary least squares") {
        const std::vector<double> x{1, 2, 3, 4};
        const std::vector<double> y{3, 5, 7, 9};
        const auto fit = ols(x, y);
        CHECK(fit.slope == doctest::Approx(2.0));
        CHECK(fit.intercept == doctest::Approx(1.0));
        CHECK(fit.r_squared == doctest::Approx(1.0));
        CHECK(ols(x, std::vector<double>(4, 0.0)).r_squared == 1.0);
    }

    TEST_CASE("degree correlation on a star: leaves share a degree rank") {
        const auto d = NodalDynamics::second_order(1.0, 0.01, 0.9 / 3.0);  // lambda_1 = 3/1.8 for K_{1,9}
        const auto sw = sweep_of(GraphKind::star, 10, d, FrequencyGrid::log_spaced(0.1, 10.0, 50));
        GraphParams s;
        s.kind = GraphKind::star;
        s.n = 10;
        const auto curve = degree_correlation(generate(s), sw);
        REQUIRE(curve.spearman.size() == 50);
        for (double r : curve.spearman) {
            CHECK(r >= -1.0);
            CHECK(r <= 1.0);
        }
        const std::vector<double> degrees{9, 1, 1, 1, 1, 1, 1, 1, 1, 1};
        CHECK(average_ranks(degrees)[1] == 5.0);
    }

    TEST_CASE("spearman curve is invariant under monotone transforms of magnitude") {
        const auto g = oracle::random_graph(60, 0.1, 9, true);
        const auto a = interaction_matrix(g);
        const auto dec = decompose(a);
        const auto d = NodalDynamics::second_order(1.0, 0.01, 0.9 / dec.eigenvalues(0));
        auto sw = sweep(a, dec, d, FrequencyGrid::log_spaced(0.1, 10.0, 40));
        const auto before = degree_correlation(g, sw);
        // |z|^2 as a complex number with magnitude |z|^2.
        sw.node_response = sw.node_response.cwiseAbs2().cast<Complex>();
        const auto after = degree_correlation(g, sw);
        for (std::size_t i = 0; i < before.spearman.size(); ++i)
            CHECK(std::abs(before.spearman[i] - after.spearman[i]) <= 1e-12);
    }

    TEST_CASE("constant degree sequences are rejected") {
        const auto d = NodalDynamics::second_order(1.0, 0.05, 0.5);
        const auto sw = sweep_of(GraphKind::cycle, 8, d, FrequencyGrid::log_spaced(0.1, 10.0, 10));
        GraphParams s;
        s.kind = GraphKind::cycle;
        s.n = 8;
        CHECK_THROWS_AS((void)degree_correlation(generate(s), sw), UndefinedStatistic);
    }

    TEST_CASE("crossover of a synthetic step curve") {
        CorrelationCurve c;
        for (int i = 0; i < 20; ++i) {
            const double w = 0.5 + 0.1 * i;
            c.omegas.push_back(w);
            c.spearman.push_back(w < 1.0 - 1e-12 ? 0.5 : -0.5);
        }
        c.pearson = c.spearman;
        const auto x = find_crossover(c);
        REQUIRE(x.has_value());
        CHECK(*x == doctest::Approx(0.95));  // midpoint of the bracketing pair (0.9, 1.0)
    }

    TEST_CASE("crossover requires persistence") {
        CorrelationCurve c;
        c.omegas = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
        c.spearman = {0.5, -0.1, -0.1, 0.2, 0.3, -0.2, -0.2, -0.2, -0.2, -0.2, 0.1, 0.1};
        c.pearson = c.spearman;
        const auto x = find_crossover(c);
        REQUIRE(x.has_value());
        CHECK(*x > 5.0);
        CHECK(*x < 6.0);
        c.spearman = std::vector<double>(12, 0.3);
        CHECK_FALSE(find_crossover(c).has_value());
    }

    TEST_CASE("peak counting") {
        const auto single = NodalDynamics::second_order(1.0, 0.05, 1.0);
        const auto a = InteractionMatrix::from_dense(Eigen::MatrixXd::Zero(1, 1));
        const auto sw = sweep(a, decompose(a), single, FrequencyGrid::default_for(1.0));
        CHECK(count_peaks(sw) == 1);

        // Two well separated bumps plus a 1 dB ripple that must be ignored.
        std::vector<double> w;
        std::vector<Complex> m;
        for (int i = 0; i < 200; ++i) {
            const double x = 0.01 * (i + 1);
            const double db = 20.0 * std::exp(-std::pow((x - 0.5) / 0.05, 2)) +
                              10.0 * std::exp(-std::pow((x - 1.5) / 0.05, 2)) + (i % 40 == 0 ? 1.0 : 0.0);
            w.push_back(x);
            m.push_back(std::pow(10.0, db / 20.0));
        }
        const auto syn = synthetic_sweep(w, m);
        CHECK(count_peaks(syn) == 2);
        CHECK(count_peaks(syn, 15.0) == 1);
    }

    TEST_CASE("residue band") {
        FrequencySweep sw = synthetic_sweep({1, 2, 3, 4, 5, 6}, std::vector<Complex>(6, 1.0));
        sw.first_mode = {1.0, 1.0, 0.1, 0.1, 0.1, 1.0};
        sw.residue_part = {0.0, 0.0, 0.9, 0.9, 0.9, 0.0};
        CHECK(longest_residue_band(sw) == 3);
        CHECK(longest_residue_band(sw, 3) == 2);
    }

    TEST_CASE("classification rules") {
        ClassEvidence e;
        e.mode = ScalingMode::sf;
        e.slope = -0.4;
        e.r_squared = 0.95;
        e.w1_trend = -0.1;
        e.residue_band = 40;
        e.peak_count = 2;
        CHECK(classify_evidence(e).cls == SensitivityClass::II);
        e.residue_band = 5;
        CHECK(classify_evidence(e).cls == SensitivityClass::inconclusive);
        ClassEvidence er;
        er.mode = ScalingMode::er;
        er.slope = -1.0;
        er.r_squared = 0.99;
        er.w1_trend = 0.02;
        er.peak_count = 1;
        CHECK(classify_evidence(er).cls == SensitivityClass::I);
        er.peak_count = 2;
        CHECK(classify_evidence(er).cls == SensitivityClass::inconclusive);
        // Reproducible from the stored evidence.
        const auto v = classify_evidence(e);
        CHECK(classify_evidence(v.evidence).cls == v.cls);
        CHECK(to_json(v).at("class") == "inconclusive");
    }

    TEST_CASE("ER weight scaling on small sizes") {
        GraphParams family;
        family.kind = GraphKind::er;
        family.p = 0.05;
        family.seed = 3;
        const std::vector<int> sizes{100, 200, 400};
        const auto r = weight_scaling(family, sizes, 5, ScalingMode::er);
        CHECK(r.sizes == sizes);
        CHECK(r.w1.size() == 3);
        CHECK(r.w1[0].size() == 5);
        CHECK(r.fit.slope < 0.0);
        CHECK(r.w1_median[2] > r.w1_median[0]);
        const auto again = weight_scaling(family, sizes, 5, ScalingMode::er);
        CHECK(again.w1 == r.w1);
        std::ostringstream csv;
        write_scaling_csv(csv, r);
        CHECK(csv.str().rfind("n,trial,w1\n", 0) == 0);
        CHECK(to_json(r).at("sizes").size() == 3);
    }

    TEST_CASE("weight scaling preconditions") {
        GraphParams family;
        family.kind = GraphKind::er;
        family.p = 0.1;
        const std::vector<int> two{50, 100};
        CHECK_THROWS_AS((void)weight_scaling(family, two, 5, ScalingMode::er), InvalidArgument);
        const std::vector<int> three{50, 100, 200};
        CHECK_THROWS_AS((void)weight_scaling(family, three, 4, ScalingMode::er), InvalidArgument);
        const std::vector<int> unsorted{50, 200, 100};
        CHECK_THROWS_AS((void)weight_scaling(family, unsorted, 5, ScalingMode::er), InvalidArgument);
    }

    TEST_CASE("complete graphs: w_1 = 1, er mode is undefined, family is class I") {
        GraphParams family;
        family.kind = GraphKind::complete;
        const std::vector<int> sizes{8, 16, 32};
        CHECK_THROWS_AS((void)weight_scaling(family, sizes, 5, ScalingMode::er), UndefinedStatistic);
        const auto sf = weight_scaling(family, sizes, 5, ScalingMode::sf);
        for (double w : sf.w1_median) CHECK(std::abs(w - 1.0) <= 1e-12);
        const auto d = NodalDynamics::second_order(std::sqrt(2.0), 0.05, 0.37949);
        const auto sw = sweep_of(GraphKind::complete, 32, d, FrequencyGrid::log_spaced(0.05, 50.0, 400));
        CHECK(classify(sf, sw).cls == SensitivityClass::I);
    }

    TEST_CASE("global weight rescaling scales A and leaves the spectral weights unchanged") {
        // kappa counts edges, so rho -> c rho gives A -> c A with the same eigenvectors.
        const double c = 0.3;
        const auto g = oracle::random_graph(80, 0.1, 4, false);
        std::vector<Edge> scaled;
        for (const auto& e : g.edges()) scaled.push_back({e.u, e.v, e.weight * c});
        const auto a = interaction_matrix(g);
        const auto b = interaction_matrix(WeightedGraph::from_edges(g.n(), scaled));
        CHECK((c * a.dense() - b.dense()).cwiseAbs().maxCoeff() <= 1e-12);
        const auto da = decompose(a);
        const auto db = decompose(b);
        CHECK((da.weights - db.weights).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(std::abs(leading_mode(g).weight - leading_mode(WeightedGraph::from_edges(g.n(), scaled)).weight) <= 1e-12);
    }
}
