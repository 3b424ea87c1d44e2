#pragma once

#include <stdexcept>
#include <string>

namespace topohk {

// Base class for all library errors. Subclasses map 1:1 onto the C API
// status codes (and onto the CLI exit codes).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad argument or misuse of an API contract.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Missing file, unreadable file, failed write.
class IoError : public Error {
public:
    using Error::Error;
};

// Malformed input data (parse failures carry file name and line number).
class FormatError : public Error {
public:
    using Error::Error;
};

// Tensor/matrix dimension disagreement; message names both shapes.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Operation invoked on an object in the wrong state
// (e.g. batching graphs that have no topological features attached).
class StateError : public Error {
public:
    using Error::Error;
};

// NaN/Inf encountered where a finite value is required.
class NumericError : public Error {
public:
    using Error::Error;
};

// Checkpoint does not match the requested architecture.
class MismatchError : public Error {
public:
    using Error::Error;
};

}  // namespace topohk
