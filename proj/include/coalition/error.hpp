#pragma once

#include <stdexcept>
#include <string>

namespace coalition {

// Failure categories surfaced by the library. The CLI maps these onto
// process exit codes, so keep the set small and stable.
enum class errc {
  invalid_argument,   // caller violated an operation precondition
  size_limit,         // input exceeds a configured enumeration limit
  insufficient_data,  // not enough rows/instances for the operation
  schema_mismatch,    // column names/counts disagree between inputs
  rank_deficient,     // design matrix is numerically rank deficient
  parse,              // malformed input file
  validation,         // structurally valid input with inconsistent content
  io,                 // file could not be read or written
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace coalition
