#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace heatup {

// Base class for every error the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad argument values, mismatched shapes, invalid configuration.
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Operation called in the wrong order (e.g. backward before forward).
class StateError : public Error {
public:
    using Error::Error;
};

// Numerically degenerate input, e.g. a zero-norm row fed to a normalizer.
class DegenerateInputError : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

// File system failure; the message names the path.
class IoError : public Error {
public:
    using Error::Error;
};

// Binary format failure; carries the byte offset where parsing stopped.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t byte_offset)
        : Error(msg + " (at byte " + std::to_string(byte_offset) + ")"),
          offset_(byte_offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class MagicMismatchError : public ParseError {
public:
    using ParseError::ParseError;
};

class TruncatedError : public ParseError {
public:
    using ParseError::ParseError;
};

class CountMismatchError : public ParseError {
public:
    using ParseError::ParseError;
};

class ChecksumError : public ParseError {
public:
    using ParseError::ParseError;
};

class VersionError : public ParseError {
public:
    using ParseError::ParseError;
};

// Rejection sampling gave up (e.g. infeasible blob-center angle constraint).
class GenerationError : public Error {
public:
    using Error::Error;
};

}  // namespace heatup
