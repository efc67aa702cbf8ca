#pragma once

#include <stdexcept>
#include <string>

namespace ionbench {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input values: bad angles, fidelities outside (0,1], bad bitstrings.
struct ValidationError : Error {
    using Error::Error;
};

/// Structurally broken files or schemas (device model JSON, circuit JSON).
struct SchemaError : Error {
    using Error::Error;
};

/// Inconsistent run configuration (e.g. device-model noise without a device).
struct ConfigError : Error {
    using Error::Error;
};

/// Gate kinds the native-gate lowering does not support.
struct CompileError : Error {
    using Error::Error;
};

/// Nonlinear fits that fail to converge or are underdetermined.
struct FitError : Error {
    using Error::Error;
};

} // namespace ionbench
