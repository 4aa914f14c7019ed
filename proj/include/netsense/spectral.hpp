#pragma once

#include <nlohmann/json.hpp>
#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "netsense/graph.hpp"

namespace netsense {

/// Full eigendecomposition of an interaction matrix together with the spectral weights
/// w_i = <1, phi_i>^2 / N of the all-ones direction.
///
/// Eigenvalues are sorted descending. Eigenvalues that tie (within a few ulps of the
/// spectral radius) are ordered by descending weight, then by solver output index.
/// Each eigenvector is signed so that <1, phi_i> >= 0; when that sum is numerically
/// zero the largest-magnitude entry is made positive instead.
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;  // column i is phi_i
    Eigen::VectorXd weights;
    double residue = 0.0;          // sum of weights[1..]

    [[nodiscard]] int n() const noexcept { return static_cast<int>(eigenvalues.size()); }
    /// <1, phi_i> for every i.
    [[nodiscard]] Eigen::VectorXd ones_projection() const;
};

[[nodiscard]] SpectralDecomposition decompose(const InteractionMatrix& a);

struct WeightSummary {
    double w1 = 0.0;
    double residue = 0.0;
    double lambda_max = 0.0;
    double lambda_min = 0.0;
};

[[nodiscard]] WeightSummary weight_summary(const SpectralDecomposition& dec);

using SparseMatrix = Eigen::SparseMatrix<double>;

/// A = rho / kappa in compressed sparse form.
[[nodiscard]] SparseMatrix sparse_interaction(const WeightedGraph& graph);

/// Largest eigenvalue and its spectral weight, by Lanczos iteration with full
/// reorthogonalization. For a nonnegative matrix with a repeated top eigenvalue the
/// weight is that of the whole top eigenspace.
struct LeadingMode {
    double lambda = 0.0;
    double weight = 0.0;
};

[[nodiscard]] LeadingMode leading_mode(const SparseMatrix& a);
[[nodiscard]] LeadingMode leading_mode(const InteractionMatrix& a);
[[nodiscard]] LeadingMode leading_mode(const WeightedGraph& graph);

/// {"eigenvalues": [...], "weights": [...], "residue": R} plus "eigenvectors" (row i is
/// phi_i) when requested.
[[nodiscard]] nlohmann::json to_json(const SpectralDecomposition& dec, bool with_vectors = false);

}  // namespace netsense
