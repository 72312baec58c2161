#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace expsample {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid arguments or configuration, detected before any computation.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A function or integrand produced an unusable value.
class EvaluationError : public Error {
public:
    using Error::Error;
};

class SingularSystemError : public Error {
public:
    using Error::Error;
};

/// Malformed expression or descriptor; `offset()` is the byte position of the failure.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

}  // namespace expsample
