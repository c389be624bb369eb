#pragma once

#include <stdexcept>
#include <string>

namespace grar {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text record; message names the line and the offending field.
class ParseError : public Error {
public:
    ParseError(const std::string& where, std::size_t line, const std::string& what)
        : Error(where + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Structurally valid record that violates a schema rule (e.g. joint count).
class SchemaError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Raster dimensions disagree with the geometry that describes them.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid parameters (k > n, empty class set, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Bounding box too small to normalize against.
class DegenerateBoxError : public Error {
public:
    using Error::Error;
};

}  // namespace grar
