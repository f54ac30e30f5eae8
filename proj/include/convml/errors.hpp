#pragma once

#include <stdexcept>
#include <string>

namespace convml {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input is not a format this toolkit handles (pcapng, exotic link types, ...).
class UnsupportedFormat : public Error {
public:
    using Error::Error;
};

/// File ended before a complete structure could be read.
class Truncated : public Error {
public:
    using Error::Error;
};

/// Malformed dotted-quad address text.
class InvalidAddress : public Error {
public:
    using Error::Error;
};

/// Could not open or write a file.
class IoError : public Error {
public:
    using Error::Error;
};

/// Structured-text parse failure; carries the 1-based source line.
class ParseError : public Error {
public:
    ParseError(const std::string& message, int line)
        : Error(message + " (line " + std::to_string(line) + ")"), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// A dataset cannot be projected back to a wider schema.
class IrreversibleProjection : public Error {
public:
    using Error::Error;
};

/// Instance or dataset schema does not match the model that scores it.
class SchemaMismatch : public Error {
public:
    using Error::Error;
};

/// Training was requested on an empty dataset.
class EmptyTrainingSet : public Error {
public:
    using Error::Error;
};

/// All-zero class counts passed where a distribution is required.
class DegenerateDistribution : public Error {
public:
    using Error::Error;
};

/// A class has too few instances for the requested fold count.
class StratificationInfeasible : public Error {
public:
    using Error::Error;
};

}  // namespace convml
