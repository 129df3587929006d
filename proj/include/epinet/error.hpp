#pragma once

#include <stdexcept>
#include <string>

namespace epinet {

/// Base of every error raised by the toolkit. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Angular coordinate outside the (2N+1)x(2N+1) grid, or an angular crop that does not fit.
class AngularIndexError : public Error {
public:
    using Error::Error;
};

/// Spatial index or parameter outside its valid range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Invalid numeric content (non-finite values, values outside [0,1], ...).
class DataError : public Error {
public:
    using Error::Error;
};

/// Tensor or image dimensions that do not line up.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Malformed or truncated file.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Inconsistent configuration (architecture, run config, parameter shape table).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Invalid synthetic scene description.
class SpecError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace epinet
