#pragma once

#include <stdexcept>
#include <string>

namespace parcelnet {

// Error categories map to distinct CLI exit codes.
enum class ErrorKind {
  Config,    // bad flags, invalid run configuration
  Data,      // unreadable/inconsistent input files, invalid meshes
  Numeric,   // non-finite loss, failed numeric checks
  Contract,  // precondition violation in an API call
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

  static int exit_code(ErrorKind k) {
    switch (k) {
      case ErrorKind::Config: return 2;
      case ErrorKind::Data: return 3;
      case ErrorKind::Numeric: return 4;
      case ErrorKind::Contract: return 5;
    }
    return 1;
  }

 private:
  ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
  if (!cond) throw Error(kind, msg);
}

}  // namespace parcelnet
