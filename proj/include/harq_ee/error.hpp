#pragma once

#include <stdexcept>
#include <string>

namespace harq_ee {

/// Parameter outside the documented domain of an operation.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not produce a trustworthy answer
/// (bracket violation, spurious root, unstable queue, ...).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw ValidationError(message);
    }
}

} // namespace detail
} // namespace harq_ee
