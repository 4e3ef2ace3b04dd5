#pragma once

#include <stdexcept>
#include <string>

namespace qlat {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two operands live in different rings Z[sqrt(d1)], Z[sqrt(d2)].
class RingMismatch : public Error {
 public:
  RingMismatch(long d1, long d2)
      : Error("ring mismatch: d=" + std::to_string(d1) + " vs d=" + std::to_string(d2)) {}
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class IncompleteData : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace qlat
