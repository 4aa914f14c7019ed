#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "netsense/dynamics.hpp"
#include "netsense/graph.hpp"

namespace netsense {

struct Forcing {
    double omega = 1.0;
    double amplitude = 1.0;
};

struct SimConfig {
    double dt = 0.01;
    double t_end = 100.0;
    Forcing forcing;
    std::vector<double> x0;     // empty means all zeros
    std::vector<double> xdot0;  // second order only; empty means all zeros
    int decimation = 1;         // keep every decimation-th step

    /// dt > 0, t_end >= 20 forcing periods, dt <= 1/50 of both the forcing period and
    /// 2 pi / omega_n.
    void validate(double omega_n) const;
};

/// Step size of 1/100 of the shorter of the forcing and natural periods, and a horizon
/// long enough for transients decaying at `decay_rate` to fall by 1e4 before the fitting
/// window (the last quarter) begins.
[[nodiscard]] SimConfig recommended_sim_config(const NodalDynamics& dyn, double decay_rate, Forcing forcing);

struct Trajectory {
    std::vector<double> t;
    Eigen::MatrixXd x;  // samples x nodes
};

/// Fixed-step RK4 integration of g(d/dt) x = A x + u(t) 1 with u = amplitude sin(omega t),
/// canonical first- and second-order dynamics only. The forcing enters with the same
/// k omega_n^2 normalization as g, so the transfer from u to x is S(s) 1.
[[nodiscard]] Trajectory simulate_forced(const InteractionMatrix& a, const NodalDynamics& dyn, const SimConfig& cfg);

struct SteadyState {
    std::vector<double> amplitude;  // gain relative to the forcing amplitude
    std::vector<double> phase;      // radians, same convention as arg S(i omega)
    std::vector<double> fit_residual;  // rms residual relative to the fitted rms amplitude
    bool steady = true;                // false if any residual exceeds 5%
};

/// Least-squares fit of a sin(omega t) + b cos(omega t) over the final 25% of the
/// trajectory, per node.
[[nodiscard]] SteadyState steady_state(const Trajectory& traj, double omega, double forcing_amplitude = 1.0);

/// Columns t, x_0 ... x_{n-1}; every `decimation`-th stored sample.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, int decimation = 1);

}  // namespace netsense
