#include "netsense/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include "netsense/error.hpp"
#include "netsense/rng.hpp"

namespace netsense {

namespace {

void normalize_sign(Eigen::Ref<Eigen::VectorXd> v, double tol) {
    const double s = v.sum();
    if (s > tol) return;
    if (s < -tol) {
        v = -v;
        return;
    }
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0.0) v = -v;
}

}  // namespace

Eigen::VectorXd SpectralDecomposition::ones_projection() const { return eigenvectors.colwise().sum().transpose(); }

SpectralDecomposition decompose(const InteractionMatrix& a) {
    const int n = a.n();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.dense());
    if (solver.info() != Eigen::Success)
        throw ConvergenceError("eigendecomposition failed to converge", std::numeric_limits<double>::quiet_NaN());
    Eigen::MatrixXd z = solver.eigenvectors();
    const Eigen::VectorXd& lam = solver.eigenvalues();

    const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
    const double sign_tol = 1e-12 * std::sqrt(static_cast<double>(n));
    const double inv_n = 1.0 / static_cast<double>(n);
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) {
        normalize_sign(z.col(i), sign_tol);
        const double s = z.col(i).sum();
        w(i) = s * s * inv_n;
    }

    // The solver returns ascending eigenvalues; reverse, then reorder tie clusters.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::reverse(order.begin(), order.end());
    const double tie_tol = 64.0 * std::numeric_limits<double>::epsilon() * scale;
    for (std::size_t begin = 0; begin < order.size();) {
        std::size_t end = begin + 1;
        while (end < order.size() && lam(order[end - 1]) - lam(order[end]) <= tie_tol) ++end;
        std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(begin),
                         order.begin() + static_cast<std::ptrdiff_t>(end),
                         [&](int x, int y) { return w(x) != w(y) ? w(x) > w(y) : x < y; });
        begin = end;
    }

    SpectralDecomposition dec;
    dec.eigenvalues.resize(n);
    dec.eigenvectors.resize(n, n);
    dec.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        dec.eigenvalues(i) = lam(order[i]);
        dec.eigenvectors.col(i) = z.col(order[i]);
        dec.weights(i) = w(order[i]);
    }
    double residue = 0.0;
    for (int i = 1; i < n; ++i) residue += dec.weights(i);
    dec.residue = residue;
    return dec;
}

WeightSummary weight_summary(const SpectralDecomposition& dec) {
    return {dec.weights(0), dec.residue, dec.eigenvalues(0), dec.eigenvalues(dec.n() - 1)};
}

SparseMatrix sparse_interaction(const WeightedGraph& graph) {
    if (graph.edges().empty()) throw InvalidArgument("interaction matrix needs at least one edge");
    const double kappa = graph.kappa();
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(2 * graph.edges().size());
    for (const auto& e : graph.edges()) {
        entries.emplace_back(e.u, e.v, e.weight / kappa);
        entries.emplace_back(e.v, e.u, e.weight / kappa);
    }
    SparseMatrix a(graph.n(), graph.n());
    a.setFromTriplets(entries.begin(), entries.end());
    return a;
}

LeadingMode leading_mode(const SparseMatrix& a) {
    const Eigen::Index n = a.rows();
    if (n == 0 || a.cols() != n) throw InvalidArgument("leading_mode needs a non-empty square matrix");

    // Start from the all-ones direction when the matrix is nonnegative: the Perron vector
    // then has a positive projection, and a degenerate top eigenvalue yields the weight of
    // the whole eigenspace. Otherwise use a fixed pseudo-random start.
    Eigen::VectorXd start = Eigen::VectorXd::Ones(n);
    bool nonnegative = true;
    for (Eigen::Index k = 0; k < a.outerSize() && nonnegative; ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it)
            if (it.value() < 0.0) {
                nonnegative = false;
                break;
            }
    if (!nonnegative) {
        Rng rng(0x5eed);
        for (Eigen::Index i = 0; i < n; ++i) start(i) = 0.5 + uniform01(rng);
    }

    const Eigen::Index max_basis = std::min<Eigen::Index>(n, 300);
    constexpr int kMaxRestarts = 50;
    constexpr double kTol = 1e-12;
    Eigen::MatrixXd q(n, max_basis);
    Eigen::VectorXd alpha(max_basis);
    Eigen::VectorXd beta(max_basis);
    double residual = std::numeric_limits<double>::infinity();

    for (int restart = 0; restart <= kMaxRestarts; ++restart) {
        q.col(0) = start.normalized();
        Eigen::Index m = 0;
        bool done = false;
        Eigen::VectorXd ritz;
        double theta = 0.0;
        while (!done) {
            Eigen::VectorXd w = a * q.col(m);
            alpha(m) = q.col(m).dot(w);
            for (int pass = 0; pass < 2; ++pass) {
                const auto basis = q.leftCols(m + 1);
                w -= basis * (basis.transpose() * w);
            }
            beta(m) = w.norm();
            ++m;

            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
            const Eigen::VectorXd sub = beta.head(m - 1);
            tri.computeFromTridiagonal(alpha.head(m), sub, Eigen::ComputeEigenvectors);
            theta = tri.eigenvalues()(m - 1);
            ritz = tri.eigenvectors().col(m - 1);
            const double scale = std::max(1.0, std::abs(theta));
            residual = beta(m - 1) * std::abs(ritz(m - 1)) / scale;
            const bool invariant = beta(m - 1) <= 1e-14 * scale;
            done = invariant || residual <= kTol || m == max_basis;
            if (!done) q.col(m) = w / beta(m - 1);
        }
        Eigen::VectorXd y = q.leftCols(m) * ritz;
        y.normalize();
        const Eigen::VectorXd ay = a * y;
        const double lambda = y.dot(ay);
        residual = (ay - lambda * y).norm() / std::max(1.0, std::abs(lambda));
        if (residual <= 1e3 * kTol) {
            const double s = y.sum();
            return {lambda, s * s / static_cast<double>(n)};
        }
        start = y;
    }
    throw ConvergenceError("leading eigenpair did not converge", residual);
}

LeadingMode leading_mode(const InteractionMatrix& a) {
    const SparseMatrix s = a.dense().sparseView();
    return leading_mode(s);
}

LeadingMode leading_mode(const WeightedGraph& graph) { return leading_mode(sparse_interaction(graph)); }

nlohmann::json to_json(const SpectralDecomposition& dec, bool with_vectors) {
    nlohmann::json j;
    j["eigenvalues"] = std::vector<double>(dec.eigenvalues.data(), dec.eigenvalues.data() + dec.n());
    j["weights"] = std::vector<double>(dec.weights.data(), dec.weights.data() + dec.n());
    j["residue"] = dec.residue;
    if (with_vectors) {
        nlohmann::json vecs = nlohmann::json::array();
        for (int i = 0; i < dec.n(); ++i) {
            const Eigen::VectorXd col = dec.eigenvectors.col(i);
            vecs.push_back(std::vector<double>(col.data(), col.data() + col.size()));
        }
        j["eigenvectors"] = std::move(vecs);
    }
    return j;
}

}  // namespace netsense
