#pragma once

#include <stdexcept>
#include <string>

namespace sumsq {

// Error categories surfaced through the C API as status codes.
enum class ErrorKind {
  invalid_argument,  // bad sizes, unknown names, out-of-range indices
  parse,             // text or JSON that does not match the grammar/schema
  domain,            // structurally valid input that violates a model rule
  numeric,           // solver breakdown
  io,                // file or format trouble
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

}  // namespace sumsq
