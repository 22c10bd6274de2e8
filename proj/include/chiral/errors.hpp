#pragma once

#include <stdexcept>
#include <string>

namespace chiral {

/// Base of every error thrown by the library. The CLI maps each subclass to
/// its own exit code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct ZeroSplitting : Error {
    using Error::Error;
};

struct NonPositiveFrequency : Error {
    using Error::Error;
};

struct QuadratureFailure : Error {
    using Error::Error;
};

struct IntegratorFailure : Error {
    using Error::Error;
};

struct InvalidState : Error {
    using Error::Error;
};

struct WindowError : Error {
    using Error::Error;
};

struct DimensionError : Error {
    using Error::Error;
};

}  // namespace chiral
