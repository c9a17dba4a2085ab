#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace ssd {

// Error taxonomy shared by the library and the CLI. Each kind maps to a
// fixed process exit code so callers can script against failures.
enum class ErrorKind {
  Config,   // bad flags, invalid parameter combinations     -> exit 2
  Io,       // unreadable/unwritable files                   -> exit 3
  Data,     // malformed or inconsistent input content       -> exit 4
  Numeric,  // infeasible sizes, degenerate linear algebra   -> exit 5
};

inline const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
    case ErrorKind::Data: return "data";
    case ErrorKind::Numeric: return "numeric";
  }
  return "unknown";
}

inline int error_kind_exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return 2;
    case ErrorKind::Io: return 3;
    case ErrorKind::Data: return 4;
    case ErrorKind::Numeric: return 5;
  }
  return 1;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  int exit_code() const { return error_kind_exit_code(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

// Non-fatal diagnostics go to stderr; artifacts on stdout/disk stay clean.
inline void warn(const std::string& message) {
  std::fputs(("warning: " + message + "\n").c_str(), stderr);
}

}  // namespace ssd
