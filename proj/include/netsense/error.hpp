#pragma once

#include <stdexcept>
#include <string>

namespace netsense {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters outside their valid range, malformed input files, bad configs.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// A transfer function was evaluated at (or numerically at) one of its poles.
class PoleError : public Error {
public:
    PoleError(const std::string& what, double omega) : Error(what), omega_(omega) {}
    [[nodiscard]] double omega() const noexcept { return omega_; }

private:
    double omega_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual) : Error(what), residual_(residual) {}
    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// The coupled system g(s) - lambda has a root with non-negative real part.
class UnstableError : public Error {
public:
    UnstableError(const std::string& what, double lambda, double margin)
        : Error(what), lambda_(lambda), margin_(margin) {}
    [[nodiscard]] double lambda() const noexcept { return lambda_; }
    [[nodiscard]] double margin() const noexcept { return margin_; }

private:
    double lambda_;
    double margin_;
};

class DivergenceError : public Error {
public:
    using Error::Error;
};

/// A statistic is undefined for the given input (e.g. correlation against a constant).
class UndefinedStatistic : public Error {
public:
    using Error::Error;
};

}  // namespace netsense
