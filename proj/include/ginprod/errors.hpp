#pragma once

#include <stdexcept>
#include <string>

namespace ginprod {

// Every failure carries a stable machine-readable code (e.g. "param.nu.range")
// so the CLI can forward it verbatim.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

class PrecisionError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

// Raised when an iterative/adaptive method runs out of budget. The best
// estimate obtained so far is kept for callers that can live with it.
class ConvergenceError : public Error {
public:
    ConvergenceError(std::string code, const std::string& what, double best, double err)
        : Error(std::move(code), what), best_(best), err_(err) {}
    double best_estimate() const noexcept { return best_; }
    double error_estimate() const noexcept { return err_; }

private:
    double best_;
    double err_;
};

}  // namespace ginprod
