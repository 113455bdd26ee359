// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace rpo {

/// Base of every error thrown by the library. `kind()` is a short stable tag
/// used by the CLI for machine-parsable diagnostics.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

// Input outside a declared box (parameter bounds, truncation interval, ...).
class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
};

// ROM factor queried outside its grid span.
class ExtrapolationError : public DomainError {
 public:
  using DomainError::DomainError;
  const char* kind() const noexcept override { return "extrapolation"; }
};

class UnknownOutputError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "unknown_output"; }
};

class FormatError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "format"; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config"; }
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "empty_input"; }
};

class EmptyDatasetError : public EmptyInputError {
 public:
  using EmptyInputError::EmptyInputError;
  const char* kind() const noexcept override { return "empty_dataset"; }
};

/// Numerical failures: the CLI maps every subclass to exit code 4.
class NumericalError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numerical"; }
};

class SingularSolveError : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "singular_solve"; }
};

class IllConditionedError : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "ill_conditioned"; }
};

}  // namespace rpo
