// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace holofredholm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated a precondition (shape mismatch, bad level index, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A point was requested at or too close to a pole / outside the domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Quadrature contour touches the spectrum or a pole.
class ContourError : public Error {
 public:
  using Error::Error;
};

/// Probe block too narrow to resolve the moment rank.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Jordan chain search did not terminate within the allowed length.
class InconclusiveError : public Error {
 public:
  using Error::Error;
};

/// Experiment setup does not satisfy the study's preconditions.
class SetupError : public Error {
 public:
  using Error::Error;
};

/// Too few usable data points for a regression.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// No admissible compact shift found for a T-coercivity witness.
class WitnessError : public Error {
 public:
  using Error::Error;
};

/// Malformed experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace holofredholm
