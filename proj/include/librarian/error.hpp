#pragma once

#include <stdexcept>
#include <string>

namespace librarian {

/// Base class for all library failures.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened / read / written.
class IoError : public Error {
public:
  using Error::Error;
};

/// Input file is syntactically broken or misses required fields.
class ParseError : public Error {
public:
  using Error::Error;
};

/// Well-formed input violates a documented invariant.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// An operation was called with arguments outside its contract.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Planned books do not fit on the target shelf level.
class ShelfOverflowError : public Error {
public:
  using Error::Error;
};

} // namespace librarian
