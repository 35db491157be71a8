#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mbexit {

// Malformed boundary expression. position is a byte offset into the input.
class SyntaxError : public std::invalid_argument {
public:
    SyntaxError(const std::string& what, std::size_t position)
        : std::invalid_argument(what + " at position " + std::to_string(position)),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

// Argument outside the mathematical domain of an operation (f(0) <= 0, a <= 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Exponential term with a non-positive decay rate.
class RateError : public DomainError {
public:
    using DomainError::DomainError;
};

// Invalid simulation or fit configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Boundary does not satisfy the monotonicity/convexity hypothesis of a check.
class HypothesisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mbexit
