#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fastrd {

/// Bad input to a constructor or operation (non-positive lengths, bad shapes).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a map (negative concentration).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Iterative method failed to converge. Carries a human-readable trace
/// (one entry per iteration or bracket update).
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, std::vector<std::string> trace = {})
        : std::runtime_error(what), trace_(std::move(trace)) {}

    const std::vector<std::string>& trace() const noexcept { return trace_; }

private:
    std::vector<std::string> trace_;
};

/// A result that must hold by construction did not (e.g. a bound violated
/// after a converged solve).
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Malformed configuration; `field` names the offending JSON path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace fastrd
