#pragma once

#include <stdexcept>
#include <string>

namespace medmarg {

// Bad inputs: out-of-range parameters, malformed configs, empty samples.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a function (e.g. p outside (0,1)).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Base for failures of a numerical procedure on otherwise valid input.
// `operation()` names the routine that failed.
class NumericalError : public std::runtime_error {
public:
    NumericalError(std::string operation, const std::string& what)
        : std::runtime_error(operation + ": " + what), operation_(std::move(operation)) {}

    const std::string& operation() const noexcept { return operation_; }

private:
    std::string operation_;
};

class ConvergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class UnsupportedFamily : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class CalibrationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace medmarg
