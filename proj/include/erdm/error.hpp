#pragma once

#include <stdexcept>
#include <string>

namespace erdm {

/// Base class for every error the engine raises on bad input.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A line or record could not be parsed.
class ParseError : public Error {
  public:
    using Error::Error;
};

/// Parsed data violates a structural invariant (overlapping spans, bad arity, ...).
class ValidationError : public Error {
  public:
    using Error::Error;
};

}  // namespace erdm
