#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace qgfisher {

//! Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

//! Invalid input: bad arguments, parameters outside a validity domain, unmet preconditions.
class DomainError : public Error {
public:
    using Error::Error;
};

//! A q-Gaussian validity condition failed. `violation()` names it
//! ("existence", "mq-finiteness", "fisher-finiteness", "divergent-integral", ...).
class ValidityError : public DomainError {
public:
    ValidityError(std::string violation, const std::string& what)
        : DomainError(violation + ": " + what), violation_(std::move(violation)) {}

    const std::string& violation() const noexcept { return violation_; }

private:
    std::string violation_;
};

//! An inequality check was asked for outside its hypotheses. `bound()` names the failing one.
class PreconditionError : public DomainError {
public:
    PreconditionError(std::string bound, const std::string& what)
        : DomainError(bound + ": " + what), bound_(std::move(bound)) {}

    const std::string& bound() const noexcept { return bound_; }

private:
    std::string bound_;
};

//! A numerical integral did not converge. Carries the last partial estimate.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double partial_value, double error_estimate)
        : Error(what), partial_(partial_value), error_(error_estimate) {}

    double partial_value() const noexcept { return partial_; }
    double error_estimate() const noexcept { return error_; }

private:
    double partial_;
    double error_;
};

//! An iterative solver stopped before meeting its tolerances.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

} // namespace qgfisher
