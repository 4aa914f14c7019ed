#include "netsense/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "netsense/error.hpp"
#include "netsense/format.hpp"

namespace netsense {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDivergenceFactor = 1e6;

Eigen::VectorXd initial_vector(const std::vector<double>& v, int n, const char* name) {
    if (v.empty()) return Eigen::VectorXd::Zero(n);
    if (static_cast<int>(v.size()) != n)
        throw InvalidArgument(std::string("simulation: ") + name + " has the wrong length");
    return Eigen::Map<const Eigen::VectorXd>(v.data(), n);
}

}  // namespace

void SimConfig::validate(double omega_n) const {
    if (!(forcing.omega > 0.0)) throw InvalidArgument("simulation: forcing frequency must be > 0");
    const double period = kTwoPi / forcing.omega;
    if (!(dt > 0.0)) throw InvalidArgument("simulation: dt must be > 0");
    if (!(t_end >= 20.0 * period)) throw InvalidArgument("simulation: horizon must cover at least 20 forcing periods");
    if (dt > period / 50.0 || dt > kTwoPi / omega_n / 50.0)
        throw InvalidArgument("simulation: dt must be at most 1/50 of the forcing and natural periods");
    if (decimation < 1) throw InvalidArgument("simulation: decimation must be >= 1");
}

SimConfig recommended_sim_config(const NodalDynamics& dyn, double decay_rate, Forcing forcing) {
    if (!(decay_rate > 0.0)) throw InvalidArgument("simulation: decay rate must be > 0 (system must be stable)");
    const double period = kTwoPi / forcing.omega;
    const double natural = kTwoPi / dyn.natural_frequency();
    SimConfig cfg;
    cfg.forcing = forcing;
    cfg.dt = std::min(period, natural) / 100.0;
    const double settle = std::log(1e4) / (0.75 * decay_rate);
    cfg.t_end = std::max(20.0 * period, settle);
    return cfg;
}

Trajectory simulate_forced(const InteractionMatrix& a, const NodalDynamics& dyn, const SimConfig& cfg) {
    const auto* second = dyn.as_second_order();
    const auto* first = dyn.as_first_order();
    if (second == nullptr && first == nullptr)
        throw InvalidArgument("simulation supports canonical first- and second-order dynamics only");
    cfg.validate(dyn.natural_frequency());

    const int n = a.n();
    const Eigen::MatrixXd& A = a.dense();
    const double wn = dyn.natural_frequency();
    const double gain = (second ? second->k : first->k) * wn * wn;
    const double damping = second ? 2.0 * second->zeta * wn : 0.0;
    const double amp = cfg.forcing.amplitude;
    const double w = cfg.forcing.omega;
    const double limit = kDivergenceFactor * std::max(std::abs(amp), 1.0);

    Eigen::VectorXd x = initial_vector(cfg.x0, n, "x0");
    Eigen::VectorXd v = initial_vector(cfg.xdot0, n, "xdot0");

    // First order: x' = -wn^2 x + gain (A x + u).
    // Second order: x'' = -damping x' - wn^2 x + gain (A x + u).
    auto accel = [&](const Eigen::VectorXd& xs, const Eigen::VectorXd& vs, double t) -> Eigen::VectorXd {
        const double u = amp * std::sin(w * t);
        Eigen::VectorXd r = gain * (A * xs);
        r.array() += gain * u;
        r -= wn * wn * xs;
        if (second) r -= damping * vs;
        return r;
    };

    const auto steps = static_cast<long long>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
    const auto samples = steps / cfg.decimation + 1;
    Trajectory traj;
    traj.t.reserve(static_cast<std::size_t>(samples));
    traj.x.resize(static_cast<Eigen::Index>(samples), n);
    Eigen::Index row = 0;
    auto record = [&](double t) {
        traj.t.push_back(t);
        traj.x.row(row++) = x.transpose();
    };
    record(0.0);

    const double h = cfg.dt;
    for (long long step = 0; step < steps; ++step) {
        const double t = static_cast<double>(step) * h;
        if (second) {
            const Eigen::VectorXd k1x = v;
            const Eigen::VectorXd k1v = accel(x, v, t);
            const Eigen::VectorXd x2 = x + 0.5 * h * k1x;
            const Eigen::VectorXd v2 = v + 0.5 * h * k1v;
            const Eigen::VectorXd k2x = v2;
            const Eigen::VectorXd k2v = accel(x2, v2, t + 0.5 * h);
            const Eigen::VectorXd x3 = x + 0.5 * h * k2x;
            const Eigen::VectorXd v3 = v + 0.5 * h * k2v;
            const Eigen::VectorXd k3x = v3;
            const Eigen::VectorXd k3v = accel(x3, v3, t + 0.5 * h);
            const Eigen::VectorXd x4 = x + h * k3x;
            const Eigen::VectorXd v4 = v + h * k3v;
            const Eigen::VectorXd k4x = v4;
            const Eigen::VectorXd k4v = accel(x4, v4, t + h);
            x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        } else {
            const Eigen::VectorXd k1 = accel(x, v, t);
            const Eigen::VectorXd k2 = accel(x + 0.5 * h * k1, v, t + 0.5 * h);
            const Eigen::VectorXd k3 = accel(x + 0.5 * h * k2, v, t + 0.5 * h);
            const Eigen::VectorXd k4 = accel(x + h * k3, v, t + h);
            x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        if (!(x.cwiseAbs().maxCoeff() <= limit))
            throw DivergenceError("simulation diverged at t = " + format_double(t + h) +
                                  " (state exceeded 1e6 x forcing amplitude)");
        if ((step + 1) % cfg.decimation == 0) record(static_cast<double>(step + 1) * h);
    }
    traj.x.conservativeResize(row, n);
    return traj;
}

SteadyState steady_state(const Trajectory& traj, double omega, double forcing_amplitude) {
    const auto samples = static_cast<std::size_t>(traj.x.rows());
    if (samples < 8 || traj.t.size() != samples) throw InvalidArgument("steady_state: trajectory too short");
    const double t_end = traj.t.back();
    if (t_end < (20.0 - 1e-6) * kTwoPi / omega) throw InvalidArgument("steady_state: trajectory covers fewer than 20 periods");
    const double t_start = traj.t.front() + 0.75 * (t_end - traj.t.front());
    std::size_t first = 0;
    while (first < samples && traj.t[first] < t_start) ++first;

    // Normal equations for [sin cos] shared by every node.
    double ss = 0.0;
    double sc = 0.0;
    double cc = 0.0;
    const std::size_t m = samples - first;
    Eigen::VectorXd sn(static_cast<Eigen::Index>(m));
    Eigen::VectorXd cs(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        const double t = traj.t[first + i];
        sn(static_cast<Eigen::Index>(i)) = std::sin(omega * t);
        cs(static_cast<Eigen::Index>(i)) = std::cos(omega * t);
        ss += sn(static_cast<Eigen::Index>(i)) * sn(static_cast<Eigen::Index>(i));
        sc += sn(static_cast<Eigen::Index>(i)) * cs(static_cast<Eigen::Index>(i));
        cc += cs(static_cast<Eigen::Index>(i)) * cs(static_cast<Eigen::Index>(i));
    }
    const double det = ss * cc - sc * sc;
    if (!(det > 0.0)) throw InvalidArgument("steady_state: degenerate fitting window");

    SteadyState out;
    const auto nodes = traj.x.cols();
    for (Eigen::Index j = 0; j < nodes; ++j) {
        const auto seg = traj.x.col(j).tail(static_cast<Eigen::Index>(m));
        const double ys = seg.dot(sn);
        const double yc = seg.dot(cs);
        const double a = (cc * ys - sc * yc) / det;
        const double b = (ss * yc - sc * ys) / det;
        const double amp = std::hypot(a, b);
        const double rms = std::sqrt((seg - a * sn - b * cs).squaredNorm() / static_cast<double>(m));
        const double rel = amp > 0.0 ? rms / (amp / std::numbers::sqrt2) : (rms > 0.0 ? INFINITY : 0.0);
        out.amplitude.push_back(amp / forcing_amplitude);
        out.phase.push_back(std::atan2(b, a));
        out.fit_residual.push_back(rel);
        if (rel > 0.05) out.steady = false;
    }
    return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, int decimation) {
    const int step = std::max(1, decimation);
    out << 't';
    for (Eigen::Index j = 0; j < traj.x.cols(); ++j) out << ",x_" << j;
    out << '\n';
    for (std::size_t i = 0; i < traj.t.size(); i += static_cast<std::size_t>(step)) {
        out << format_double(traj.t[i]);
        for (Eigen::Index j = 0; j < traj.x.cols(); ++j) out << ',' << format_double(traj.x(static_cast<Eigen::Index>(i), j));
        out << '\n';
    }
}

}  // namespace netsense
