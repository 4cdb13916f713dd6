#pragma once

#include <stdexcept>
#include <string>

namespace gustuq {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value lies outside the domain an operation is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Bad argument: sizes, counts, probabilities.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A surrogate could not be fitted (rank deficiency, factorization failure).
class FitError : public Error {
 public:
  using Error::Error;
};

// Inconsistent model or study configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Oracle lacks a requested capability (e.g. gradients).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// Ground truth failed its independent Monte Carlo cross-check.
class FidelityError : public Error {
 public:
  using Error::Error;
};

// Oracle failure, re-thrown with the location of the failing evaluation.
class OracleError : public Error {
 public:
  using Error::Error;
};

}  // namespace gustuq
