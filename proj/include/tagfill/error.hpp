#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tagfill {

// Broad failure categories. The CLI maps each one to its own exit code.
enum class ErrorKind {
  kIo,          // missing or unreadable/unwritable files
  kFormat,      // malformed input files (TSV/JSON lines/model dumps)
  kProtocol,    // an external plugin broke its contract
  kStructural,  // an edit script or template violates its invariants
  kData,        // input is well-formed but unusable (e.g. one class only)
};

inline std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo: return "io";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kProtocol: return "protocol";
    case ErrorKind::kStructural: return "structural";
    case ErrorKind::kData: return "data";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace tagfill
