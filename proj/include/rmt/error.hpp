#pragma once

#include <stdexcept>
#include <string>

namespace rmt {

/// Failure categories. Each maps onto one CLI exit code.
enum class ErrorKind {
  parameter,   // invalid argument or config value
  shape,       // length / size mismatch
  io,          // unreadable or unwritable file
  capacity,    // documented size bound exceeded
  numerical,   // iteration failed to converge
  invariant,   // internal consistency check tripped
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

/// 2 validation, 3 capacity, 4 numerical or invariant violation.
inline int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::capacity:
      return 3;
    case ErrorKind::numerical:
    case ErrorKind::invariant:
      return 4;
    default:
      return 2;
  }
}

}  // namespace rmt
