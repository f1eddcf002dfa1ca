#pragma once

#include <stdexcept>
#include <string>

namespace gafill {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration, schema, or argument combinations. CLI exit code 2.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Problems with input data or artifact files. CLI exit code 3.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(what) {}
};

/// Numerical failures: non-finite losses, singular systems. CLI exit code 4.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(what) {}
};

} // namespace gafill
