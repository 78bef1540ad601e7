#pragma once

#include <stdexcept>
#include <string>

namespace biparam {

/// A violated precondition: bad geometry, out-of-range parameters, malformed input.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not reach its declared tolerance or threshold.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message)
{
    if (!condition) {
        throw InvalidArgument(message);
    }
}

} // namespace biparam
