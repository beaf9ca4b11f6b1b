#pragma once

#include <stdexcept>
#include <string>

namespace ohx {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied argument or configuration violates an operation's
/// precondition (bad grid size, unknown family, unsupported window, ...).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

}  // namespace ohx
