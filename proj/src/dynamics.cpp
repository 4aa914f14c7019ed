#include "netsense/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "netsense/error.hpp"

namespace netsense {

namespace {

constexpr double kPoleFloor = 1e-300;
constexpr double kMarginalTol = 1e-9;

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw InvalidArgument(std::string(name) + " must be positive and finite");
}

}  // namespace

NodalDynamics NodalDynamics::first_order(double omega_n, double k) {
    require_positive(omega_n, "omega_n");
    require_positive(k, "k");
    NodalDynamics d;
    const double scale = k * omega_n * omega_n;
    d.coeffs_ = {omega_n * omega_n / scale, 1.0 / scale};
    d.descriptor_ = FirstOrder{omega_n, k};
    return d;
}

NodalDynamics NodalDynamics::second_order(double omega_n, double zeta, double k) {
    require_positive(omega_n, "omega_n");
    require_positive(zeta, "zeta");
    require_positive(k, "k");
    NodalDynamics d;
    const double scale = k * omega_n * omega_n;
    d.coeffs_ = {omega_n * omega_n / scale, 2.0 * zeta * omega_n / scale, 1.0 / scale};
    d.descriptor_ = SecondOrder{omega_n, zeta, k};
    return d;
}

NodalDynamics NodalDynamics::custom(std::vector<double> g_coeffs) {
    if (g_coeffs.size() < 2) throw InvalidArgument("g must have degree >= 1");
    if (g_coeffs.back() == 0.0) throw InvalidArgument("leading coefficient of g must be nonzero");
    for (double c : g_coeffs)
        if (!std::isfinite(c)) throw InvalidArgument("g coefficients must be finite");
    NodalDynamics d;
    d.coeffs_ = std::move(g_coeffs);
    return d;
}

double NodalDynamics::natural_frequency() const {
    if (const auto* p = as_second_order()) return p->omega_n;
    if (const auto* p = as_first_order()) return p->omega_n;
    return 1.0;
}

Complex NodalDynamics::g(Complex s) const {
    Complex acc = coeffs_.back();
    for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) acc = acc * s + *it;
    return acc;
}

Complex f_eval(const NodalDynamics& dyn, Complex s) {
    const Complex g = dyn.g(s);
    if (std::abs(g) <= kPoleFloor) throw PoleError("f(s) evaluated at a pole of f", s.imag());
    return 1.0 / g;
}

Complex h_eval(const NodalDynamics& dyn, double lambda, Complex s) {
    const Complex d = dyn.g(s) - lambda;
    if (std::abs(d) <= kPoleFloor) throw PoleError("h(s) evaluated at a pole (g(s) = lambda)", s.imag());
    return 1.0 / d;
}

std::vector<Complex> closed_loop_roots(const NodalDynamics& dyn, double lambda) {
    std::vector<double> c = dyn.g_coeffs();
    c[0] -= lambda;
    const int deg = static_cast<int>(c.size()) - 1;
    if (deg == 1) return {Complex(-c[0] / c[1], 0.0)};
    if (deg == 2) {
        const double a = c[2];
        const double b = c[1];
        const double cc = c[0];
        const double disc = b * b - 4.0 * a * cc;
        if (disc >= 0.0) {
            // Numerically stable pair.
            const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
            if (q == 0.0) return {Complex(0.0, 0.0), Complex(0.0, 0.0)};
            return {Complex(q / a, 0.0), Complex(cc / q, 0.0)};
        }
        const double re = -b / (2.0 * a);
        const double im = std::sqrt(-disc) / (2.0 * a);
        return {Complex(re, im), Complex(re, -im)};
    }
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -c[static_cast<std::size_t>(i)] / c.back();
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success)
        throw ConvergenceError("companion matrix eigenvalues did not converge", std::numeric_limits<double>::quiet_NaN());
    std::vector<Complex> roots;
    for (int i = 0; i < deg; ++i) roots.push_back(solver.eigenvalues()(i));
    return roots;
}

Stability is_stable(const NodalDynamics& dyn, double lambda) {
    const auto roots = closed_loop_roots(dyn, lambda);
    double max_re = -std::numeric_limits<double>::infinity();
    for (const auto& r : roots) max_re = std::max(max_re, r.real());
    Stability st;
    st.margin = -max_re;
    st.marginal = std::abs(max_re) <= kMarginalTol;
    if (dyn.degree() <= 2) {
        // Routh-Hurwitz: all coefficients of g - lambda share the sign of the leading one.
        std::vector<double> c = dyn.g_coeffs();
        c[0] -= lambda;
        const double lead = c.back();
        const bool hurwitz = std::all_of(c.begin(), c.end(), [&](double x) { return x * lead > 0.0; });
        st.stable = hurwitz && !st.marginal;
    } else {
        st.stable = max_re < -kMarginalTol;
    }
    return st;
}

double max_stable_gain(double omega_n, double zeta, double lambda_max, double safety_c) {
    if (!(lambda_max > 0.0)) throw InvalidArgument("max_stable_gain: lambda_max must be > 0");
    if (!(safety_c > 0.0 && safety_c < 1.0)) throw InvalidArgument("max_stable_gain: safety margin must lie in (0, 1)");
    const double k = (1.0 - safety_c) / lambda_max;
    if (!is_stable(NodalDynamics::second_order(omega_n, zeta, k), lambda_max).stable)
        throw UnstableError("gain (1 - c)/lambda_max does not stabilize the system", lambda_max, 0.0);
    return k;
}

SecondOrder er_limit_params(const SecondOrder& p) {
    if (!(p.k < 1.0)) throw InvalidArgument("ER limit requires k < 1");
    const double r = std::sqrt(1.0 - p.k);
    return {p.omega_n * r, p.zeta / r, p.k / (1.0 - p.k)};
}

SecondOrder er_limit_params_inverse(const SecondOrder& limit) {
    const double k = limit.k / (1.0 + limit.k);
    const double r = std::sqrt(1.0 - k);
    return {limit.omega_n / r, limit.zeta * r, k};
}

NodalDynamics er_limit_model(const NodalDynamics& dyn) {
    const auto* p = dyn.as_second_order();
    if (p == nullptr) throw InvalidArgument("ER limit model requires second-order canonical dynamics");
    return NodalDynamics::second_order(er_limit_params(*p));
}

Complex closed_loop_limit_eval(const NodalDynamics& dyn, Complex s) { return h_eval(dyn, 1.0, s); }

NodalDynamics dynamics_from_json(const nlohmann::json& j) {
    auto number = [&](const char* key, double fallback) {
        if (!j.contains(key)) return fallback;
        if (!j.at(key).is_number()) throw InvalidArgument(std::string("dynamics: '") + key + "' must be a number");
        return j.at(key).get<double>();
    };
    const bool has_coeffs = j.contains("g_coeffs");
    if (has_coeffs && (!j.contains("order") || j.at("order") == "custom")) {
        if (!j.at("g_coeffs").is_array()) throw InvalidArgument("dynamics: g_coeffs must be an array");
        return NodalDynamics::custom(j.at("g_coeffs").get<std::vector<double>>());
    }
    const auto& order = j.contains("order") ? j.at("order") : nlohmann::json(2);
    if (!order.is_number_integer()) throw InvalidArgument("dynamics: order must be 1, 2 or \"custom\"");
    const int o = order.get<int>();
    if (!j.contains("k")) throw InvalidArgument("dynamics: missing gain 'k'");
    if (o == 1) return NodalDynamics::first_order(number("omega_n", 1.0), number("k", 1.0));
    if (o == 2) return NodalDynamics::second_order(number("omega_n", 1.0), number("zeta", 0.05), number("k", 1.0));
    throw InvalidArgument("dynamics: order must be 1, 2 or \"custom\"");
}

nlohmann::json to_json(const NodalDynamics& dyn) {
    nlohmann::json j;
    if (const auto* p = dyn.as_second_order()) {
        j = {{"order", 2}, {"omega_n", p->omega_n}, {"zeta", p->zeta}, {"k", p->k}};
    } else if (const auto* p = dyn.as_first_order()) {
        j = {{"order", 1}, {"omega_n", p->omega_n}, {"k", p->k}};
    } else {
        j = {{"order", "custom"}};
    }
    j["g_coeffs"] = dyn.g_coeffs();
    return j;
}

}  // namespace netsense
