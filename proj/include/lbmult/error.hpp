// Copyright 2026 The lbmult Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace lbmult {

/// Six significant digits, for error messages.
inline std::string message_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: dimension mismatch, bad parameter, unreadable file.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
 public:
  DimensionMismatch(const std::string& where, int expected, int got)
      : InvalidArgument(where + ": dimension mismatch (expected " + std::to_string(expected) +
                        ", got " + std::to_string(got) + ")") {}
};

/// Two sampled objects whose grids cannot be combined without interpolation.
class IncommensurateGrid : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A mathematical precondition does not hold (e.g. the bump fails condition (A)).
class PreconditionFailure : public Error {
 public:
  using Error::Error;
};

/// The computation ran but its numerical safeguards tripped.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace lbmult
