#pragma once

#include <stdexcept>
#include <string>

namespace stepcast {

/// Raised when a curve is evaluated outside its domain bounds.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised for malformed inputs (empty particle sets, mismatched domains, ...).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when demand and supply never cross on their common quantity range.
class NoIntersectionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by config/bid validation with a message naming the offending field.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace stepcast
