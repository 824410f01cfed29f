#pragma once

#include <stdexcept>
#include <string>

namespace ptg {

// Bad arguments: index/dimension mismatches, values outside a declared domain.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// A precondition of the calculus was violated (non-unitary evolution,
// incomplete measurement family).
struct ContractViolation : std::runtime_error {
    explicit ContractViolation(const std::string& what) : std::runtime_error(what) {}
};

// A specification failed while being evaluated (expression value out of
// domain, probability outside [0,1], measurement mass lost beyond budget).
struct EvaluationError : std::runtime_error {
    explicit EvaluationError(const std::string& what) : std::runtime_error(what) {}
};

// A party touched qubits or variables it does not own.
struct LocalityViolation : std::runtime_error {
    explicit LocalityViolation(const std::string& what) : std::runtime_error(what) {}
};

// Conditioning or normalizing on an event of probability zero.
struct UndefinedConditional : std::runtime_error {
    explicit UndefinedConditional(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ptg
