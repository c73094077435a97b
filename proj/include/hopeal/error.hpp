#pragma once

#include <stdexcept>
#include <string>

namespace hopeal {

/// Bad input data or configuration: missing files, malformed CSV, invalid
/// arguments, precondition violations. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure talking to an external scorer process. The CLI maps this to exit
/// code 3.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hopeal
