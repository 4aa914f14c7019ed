#pragma once

#include <complex>
#include <optional>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace netsense {

using Complex = std::complex<double>;

/// g(s) = (s + omega_n^2) / (k omega_n^2)
struct FirstOrder {
    double omega_n = 1.0;
    double k = 1.0;
};

/// g(s) = (s^2 + 2 zeta omega_n s + omega_n^2) / (k omega_n^2)
struct SecondOrder {
    double omega_n = 1.0;
    double zeta = 0.05;
    double k = 1.0;
};

/// Linear nodal operator g as a real polynomial in s; the isolated node's transfer
/// function is f = 1/g. The gain of the canonical forms lives inside g.
class NodalDynamics {
public:
    using Descriptor = std::variant<std::monostate, FirstOrder, SecondOrder>;

    static NodalDynamics first_order(double omega_n, double k);
    static NodalDynamics second_order(double omega_n, double zeta, double k);
    static NodalDynamics first_order(const FirstOrder& p) { return first_order(p.omega_n, p.k); }
    static NodalDynamics second_order(const SecondOrder& p) { return second_order(p.omega_n, p.zeta, p.k); }
    /// Coefficients in ascending powers of s. Trailing zeros are rejected.
    static NodalDynamics custom(std::vector<double> g_coeffs);

    [[nodiscard]] const std::vector<double>& g_coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    [[nodiscard]] const Descriptor& descriptor() const noexcept { return descriptor_; }
    [[nodiscard]] const SecondOrder* as_second_order() const { return std::get_if<SecondOrder>(&descriptor_); }
    [[nodiscard]] const FirstOrder* as_first_order() const { return std::get_if<FirstOrder>(&descriptor_); }
    /// omega_n of a canonical form, 1 for custom polynomials.
    [[nodiscard]] double natural_frequency() const;

    /// Horner evaluation of g.
    [[nodiscard]] Complex g(Complex s) const;

private:
    NodalDynamics() = default;
    std::vector<double> coeffs_;
    Descriptor descriptor_;
};

/// f(s) = 1/g(s). Throws PoleError when |g(s)| <= 1e-300.
[[nodiscard]] Complex f_eval(const NodalDynamics& dyn, Complex s);

/// h(s) = f/(1 - lambda f), evaluated as 1/(g(s) - lambda).
[[nodiscard]] Complex h_eval(const NodalDynamics& dyn, double lambda, Complex s);

struct Stability {
    bool stable = false;
    bool marginal = false;  // some root has |Re| <= 1e-9
    double margin = 0.0;    // -max Re(root)
};

/// Roots of g(s) - lambda, via the quadratic formula up to degree 2 and companion-matrix
/// eigenvalues otherwise.
[[nodiscard]] std::vector<Complex> closed_loop_roots(const NodalDynamics& dyn, double lambda);

/// Stable iff every root of g(s) - lambda has real part < -1e-9. Marginal roots count as
/// unstable.
[[nodiscard]] Stability is_stable(const NodalDynamics& dyn, double lambda);

/// k = (1 - safety_c) / lambda_max.
[[nodiscard]] double max_stable_gain(double omega_n, double zeta, double lambda_max, double safety_c);

/// Scalar oscillator whose transfer function is f/(1 - f): the mean response of a network
/// whose all-ones direction is an eigenvector with eigenvalue 1.
[[nodiscard]] NodalDynamics er_limit_model(const NodalDynamics& dyn);
[[nodiscard]] SecondOrder er_limit_params(const SecondOrder& p);
/// Inverse of er_limit_params.
[[nodiscard]] SecondOrder er_limit_params_inverse(const SecondOrder& limit);

/// f/(1 - f) = 1/(g(s) - 1).
[[nodiscard]] Complex closed_loop_limit_eval(const NodalDynamics& dyn, Complex s);

/// Accepts {"order": 1|2, "omega_n", "zeta", "k"}, {"order": "custom", "g_coeffs": [...]}
/// or {"g_coeffs": [...]}.
[[nodiscard]] NodalDynamics dynamics_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const NodalDynamics& dyn);

}  // namespace netsense
