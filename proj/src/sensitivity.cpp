#include "netsense/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "netsense/error.hpp"
#include "netsense/format.hpp"

namespace netsense {

namespace {

constexpr double kMinRcond = 1e-12;
constexpr double kSpectralPoleTol = 1e-12;

std::string at_omega(double omega) {
    std::ostringstream os;
    os.precision(17);
    os << " at omega = " << omega;
    return os.str();
}

}  // namespace

FrequencyGrid FrequencyGrid::log_spaced(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2) throw InvalidArgument("log grid needs 0 < lo < hi and count >= 2");
    std::vector<double> w(static_cast<std::size_t>(count));
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int i = 0; i < count; ++i)
        w[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / (count - 1));
    w.front() = lo;
    w.back() = hi;
    return from_values(std::move(w));
}

FrequencyGrid FrequencyGrid::from_values(std::vector<double> omegas) {
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        if (!(omegas[i] > 0.0) || !std::isfinite(omegas[i])) throw InvalidArgument("grid frequencies must be positive");
        if (i > 0 && !(omegas[i] > omegas[i - 1])) throw InvalidArgument("grid frequencies must be strictly increasing");
    }
    FrequencyGrid g;
    g.omegas_ = std::move(omegas);
    return g;
}

FrequencyGrid FrequencyGrid::default_for(double omega_n) { return log_spaced(1e-2 * omega_n, 1e2 * omega_n, 400); }

Eigen::VectorXcd node_sensitivity(const InteractionMatrix& a, const NodalDynamics& dyn, double omega) {
    const int n = a.n();
    const Complex g = dyn.g(Complex(0.0, omega));
    Eigen::MatrixXcd m = -a.dense().cast<Complex>();
    m.diagonal().array() += g;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
    const double rcond = lu.rcond();
    if (!(rcond >= kMinRcond))
        throw PoleError("g(i omega) I - A is numerically singular (rcond " + std::to_string(rcond) + ")" +
                            at_omega(omega),
                        omega);
    const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(n);
    Eigen::VectorXcd x = lu.solve(ones);
    const double residual = (m * x - ones).norm();
    if (!(residual <= 1e-9 * std::sqrt(static_cast<double>(n))))
        throw PoleError("node sensitivity residual " + std::to_string(residual) + " too large" + at_omega(omega),
                        omega);
    return x;
}

Complex mean_sensitivity_direct(const InteractionMatrix& a, const NodalDynamics& dyn, double omega) {
    return node_sensitivity(a, dyn, omega).mean();
}

ModalSplit mean_sensitivity_spectral(const SpectralDecomposition& dec, const NodalDynamics& dyn, double omega) {
    const Complex g = dyn.g(Complex(0.0, omega));
    const int n = dec.n();
    auto h = [&](int i) {
        const double lam = dec.eigenvalues(i);
        const Complex d = g - lam;
        if (std::abs(d) <= kSpectralPoleTol * std::max(1.0, std::abs(lam)))
            throw PoleError("g(i omega) coincides with eigenvalue " + std::to_string(lam) + at_omega(omega), omega);
        return 1.0 / d;
    };
    ModalSplit out;
    out.first_mode = dec.weights(0) * h(0);
    Complex residue = 0.0;
    for (int i = 1; i < n; ++i) residue += dec.weights(i) * h(i);
    out.residue_part = residue;
    out.total = out.first_mode + out.residue_part;
    return out;
}

FrequencySweep sweep(const InteractionMatrix& a, const SpectralDecomposition& dec, const NodalDynamics& dyn,
                     const FrequencyGrid& grid) {
    const int n = dec.n();
    if (a.n() != n) throw InvalidArgument("sweep: matrix and decomposition sizes differ");
    for (double lam : {dec.eigenvalues(0), dec.eigenvalues(n - 1)}) {
        const auto st = is_stable(dyn, lam);
        if (!st.stable)
            throw UnstableError("coupled system is " + std::string(st.marginal ? "marginally stable" : "unstable") +
                                    " at eigenvalue " + format_double(lam) + " (margin " + format_double(st.margin) +
                                    ")",
                                lam, st.margin);
    }

    std::vector<double> kept;
    std::vector<ModalSplit> splits;
    FrequencySweep out;
    for (double w : grid.omegas()) {
        try {
            splits.push_back(mean_sensitivity_spectral(dec, dyn, w));
            kept.push_back(w);
        } catch (const PoleError&) {
            out.skipped.push_back(w);
        }
    }
    out.grid = FrequencyGrid::from_values(kept);

    // Node responses: Phi * diag(h) * Phi^T 1 for every kept frequency in one product.
    const Eigen::VectorXd proj = dec.ones_projection();
    const auto count = static_cast<Eigen::Index>(kept.size());
    Eigen::MatrixXd coef_re(n, count);
    Eigen::MatrixXd coef_im(n, count);
    for (Eigen::Index c = 0; c < count; ++c) {
        const Complex g = dyn.g(Complex(0.0, kept[static_cast<std::size_t>(c)]));
        for (int i = 0; i < n; ++i) {
            const Complex h = proj(i) / (g - dec.eigenvalues(i));
            coef_re(i, c) = h.real();
            coef_im(i, c) = h.imag();
        }
    }
    out.node_response.resize(n, count);
    out.node_response.real() = dec.eigenvectors * coef_re;
    out.node_response.imag() = dec.eigenvectors * coef_im;

    out.mean_response.reserve(kept.size());
    out.first_mode.reserve(kept.size());
    out.residue_part.reserve(kept.size());
    for (const auto& s : splits) {
        out.mean_response.push_back(s.total);
        out.first_mode.push_back(s.first_mode);
        out.residue_part.push_back(s.residue_part);
    }
    return out;
}

double magnitude_db(Complex z) { return 20.0 * std::log10(std::abs(z)); }

double phase_deg(Complex z) { return std::arg(z) * 180.0 / std::numbers::pi; }

void write_sweep_csv(std::ostream& out, const FrequencySweep& sw, bool per_node) {
    out << "omega,re_mean,im_mean,mag_mean_db,phase_mean_deg,re_first,im_first,re_residue,im_residue";
    if (per_node)
        for (Eigen::Index i = 0; i < sw.node_response.rows(); ++i) out << ",mag_db_" << i << ",phase_deg_" << i;
    out << '\n';
    for (std::size_t w = 0; w < sw.grid.size(); ++w) {
        const Complex m = sw.mean_response[w];
        out << format_double(sw.grid[w]) << ',' << format_double(m.real()) << ',' << format_double(m.imag()) << ','
            << format_double(magnitude_db(m)) << ',' << format_double(phase_deg(m)) << ','
            << format_double(sw.first_mode[w].real()) << ',' << format_double(sw.first_mode[w].imag()) << ','
            << format_double(sw.residue_part[w].real()) << ',' << format_double(sw.residue_part[w].imag());
        if (per_node) {
            for (Eigen::Index i = 0; i < sw.node_response.rows(); ++i) {
                const Complex z = sw.node_response(i, static_cast<Eigen::Index>(w));
                out << ',' << format_double(magnitude_db(z)) << ',' << format_double(phase_deg(z));
            }
        }
        out << '\n';
    }
}

}  // namespace netsense
