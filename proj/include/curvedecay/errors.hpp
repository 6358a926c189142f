#pragma once

#include <stdexcept>
#include <string>

namespace curvedecay {

// Argument outside the mathematical domain of an operation (t outside I,
// q < 2, hypothesis of an estimate violated, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Request beyond what the implementation supports (derivative order above
// max_order, unsupported sphere dimension, Airy argument out of range).
class CapabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Rank-deficient derivative frame. order() is the first derivative order at
// which linear independence fails.
class DegeneracyError : public std::runtime_error {
public:
    DegeneracyError(int order, const std::string& what)
        : std::runtime_error(what), order_(order) {}
    int order() const noexcept { return order_; }

private:
    int order_;
};

class NoRootError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Regression design too poorly conditioned to support a fit.
class DiagnosticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed curve file or experiment config.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace curvedecay
