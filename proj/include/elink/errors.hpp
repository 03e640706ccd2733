#pragma once

#include <stdexcept>
#include <string>

namespace elink {

// Base for every error the library raises on bad input. The CLI maps these
// to exit code 1; anything else (including InvariantError) maps to 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller broke a precondition (index out of range, bad argument).
class UsageError : public Error {
public:
    using Error::Error;
};

// Model or schema violates its construction invariants.
class ModelError : public Error {
public:
    using Error::Error;
};

// Input data is malformed (missing column, duplicate id, bad row).
class DataError : public Error {
public:
    using Error::Error;
};

// A structured document (model, config) could not be parsed.
class ParseError : public Error {
public:
    using Error::Error;
};

// Profile calibration cannot satisfy its separation constraints.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

// Internal consistency check failed. Indicates a bug, not bad input.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace elink
