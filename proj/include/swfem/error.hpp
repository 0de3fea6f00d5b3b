#pragma once

#include <stdexcept>
#include <string>

namespace swfem {

/// Base class for every error raised by the library. `code()` is a short
/// machine-readable token (used by the CLI's one-line error output).
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class MeshError : public Error {
public:
    using Error::Error;
};

class ElementError : public Error {
public:
    using Error::Error;
};

/// Raised when the layer depth is non-positive at a quadrature point.
class StateError : public Error {
public:
    explicit StateError(const std::string& message) : Error("invalid_state", message) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error("io", message) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("config", message) {}
};

}  // namespace swfem
