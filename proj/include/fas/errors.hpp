#pragma once

#include <stdexcept>
#include <string>

namespace fas {

/// Base class for all library errors.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// A scalar argument is outside the mathematical domain of the operation.
class DomainError : public Error {
   public:
    using Error::Error;
};

/// A configuration object violates its invariants.
class ConfigError : public Error {
   public:
    using Error::Error;
};

/// The requested operating point has no admissible solution
/// (effective blocklength below the coding threshold, empty search set, ...).
class InfeasibleError : public Error {
   public:
    using Error::Error;
};

/// An iterative numerical routine failed to converge or overflowed.
class NumericalError : public Error {
   public:
    using Error::Error;
};

/// The data contradicts a structural assumption of the model
/// (covariance not PSD, power-law fit with non-positive exponent, ...).
class ModelError : public Error {
   public:
    using Error::Error;
};

/// An operation was called with an incompatible combination of inputs.
class UsageError : public Error {
   public:
    using Error::Error;
};

}  // namespace fas
