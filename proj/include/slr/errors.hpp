#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slr {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (dimension mismatch, id out of range, K = 0, ...).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// A vector could not be scaled to unit length.
class NormalizationError : public Error {
public:
    using Error::Error;
};

/// The requested algorithm does not support this index (e.g. Fagin on a sparse index).
class UnsupportedError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Wrong magic, unknown version, or a structurally invalid file.
class FormatError : public Error {
public:
    using Error::Error;
};

class TruncatedError : public FormatError {
public:
    using FormatError::FormatError;
};

class ChecksumError : public FormatError {
public:
    using FormatError::FormatError;
};

/// Malformed text input. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class DuplicateEntryError : public ParseError {
public:
    using ParseError::ParseError;
};

class IndexRangeError : public ParseError {
public:
    using ParseError::ParseError;
};

}  // namespace slr
