#pragma once

#include <stdexcept>
#include <string>

namespace sinbad {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (element dims vs projection dims, descriptor
/// length vs model dims, ...).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A model or transform could not be fitted from the supplied data.
class FitError : public Error {
public:
    using Error::Error;
};

/// Malformed or unreadable input files.
class DataError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration values or flags.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace sinbad
