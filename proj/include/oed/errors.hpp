// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace oed {

// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The evaluation point is outside the objective's domain: the information
// matrix is numerically singular or indefinite.
class DomainError : public Error {
 public:
  using Error::Error;
};

// The box-constrained budget set {x : e'x = N, l <= x <= u} is empty.
class EmptySetError : public Error {
 public:
  using Error::Error;
};

// Every coordinate is pinned at a bound in the same direction, so no
// exchange pair exists (the feasible set is a single point).
class DegenerateSetError : public Error {
 public:
  using Error::Error;
};

// The instance admits no feasible integer design.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// An instance file or flag value is malformed.
class ParseError : public Error {
 public:
  using Error::Error;
};

// The stored design matrix is column-rank-deficient.
class RankError : public Error {
 public:
  using Error::Error;
};

// An exhaustive enumeration would exceed the configured cap.
class TooLargeError : public Error {
 public:
  using Error::Error;
};

}  // namespace oed
