#pragma once

#include <stdexcept>
#include <string>

namespace uavad {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input that could not be parsed (bad JSON line, bad CSV row, ...).
class ParseError : public Error {
public:
    using Error::Error;
};

// Input parsed but violates a domain invariant (w < 1, label outside {0,1}, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Binary container format violation (wrong magic, truncated payload, ...).
class FormatError : public Error {
public:
    using Error::Error;
};

// Persisted artifact written by an incompatible format version.
class VersionError : public Error {
public:
    using Error::Error;
};

// Persisted artifact whose payload fails its checksum.
class CorruptionError : public Error {
public:
    using Error::Error;
};

// Invalid configuration (bad field value, unknown agent id, missing stage input, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Iterative solver failed to reach its stopping criterion within the cap.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Numerical failure during training (NaN loss and similar).
class TrainError : public Error {
public:
    using Error::Error;
};

} // namespace uavad
