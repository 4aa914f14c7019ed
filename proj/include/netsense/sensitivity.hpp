#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "netsense/dynamics.hpp"
#include "netsense/graph.hpp"
#include "netsense/spectral.hpp"

namespace netsense {

/// Strictly increasing positive angular frequencies.
class FrequencyGrid {
public:
    static FrequencyGrid log_spaced(double lo, double hi, int count);
    static FrequencyGrid from_values(std::vector<double> omegas);
    /// 400 log-spaced points over [1e-2, 1e2] * omega_n.
    static FrequencyGrid default_for(double omega_n);

    [[nodiscard]] std::span<const double> omegas() const noexcept { return omegas_; }
    [[nodiscard]] std::size_t size() const noexcept { return omegas_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return omegas_[i]; }

private:
    std::vector<double> omegas_;
};

/// Responses of every node and of the network mean over a frequency grid.
/// Frequencies too close to a pole are skipped and listed in `skipped`; `grid` holds the
/// evaluated points only.
struct FrequencySweep {
    FrequencyGrid grid;
    Eigen::MatrixXcd node_response;  // n x grid.size(); column w is S_N(i omega_w)
    std::vector<Complex> mean_response;
    std::vector<Complex> first_mode;    // w_1 h_1
    std::vector<Complex> residue_part;  // sum_{i>=2} w_i h_i
    std::vector<double> skipped;
};

/// x solving (g(i omega) I - A) x = 1 with a dense complex LU factorization.
/// Throws PoleError when the reciprocal condition estimate drops below 1e-12.
[[nodiscard]] Eigen::VectorXcd node_sensitivity(const InteractionMatrix& a, const NodalDynamics& dyn, double omega);

[[nodiscard]] Complex mean_sensitivity_direct(const InteractionMatrix& a, const NodalDynamics& dyn, double omega);

struct ModalSplit {
    Complex total;
    Complex first_mode;
    Complex residue_part;
};

/// sum_i w_i h_i(i omega); the residue part is summed explicitly over i >= 2.
[[nodiscard]] ModalSplit mean_sensitivity_spectral(const SpectralDecomposition& dec, const NodalDynamics& dyn,
                                                   double omega);

/// Rejects unstable systems up front (UnstableError), then evaluates node and mean
/// responses at every grid point through the eigendecomposition.
[[nodiscard]] FrequencySweep sweep(const InteractionMatrix& a, const SpectralDecomposition& dec,
                                   const NodalDynamics& dyn, const FrequencyGrid& grid);

/// Columns: omega, re_mean, im_mean, mag_mean_db, phase_mean_deg, re_first, im_first,
/// re_residue, im_residue, then mag_db_<i>, phase_deg_<i> per node when requested.
void write_sweep_csv(std::ostream& out, const FrequencySweep& sw, bool per_node = false);

[[nodiscard]] double magnitude_db(Complex z);
[[nodiscard]] double phase_deg(Complex z);

}  // namespace netsense
