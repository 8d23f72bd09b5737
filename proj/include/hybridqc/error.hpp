#pragma once

#include <stdexcept>
#include <string>

namespace hqc {

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  numerical,
  config,
  verification,
  io,
};

/// Single exception type for the library; the code decides how callers react
/// (the C API and the CLI map it onto status values and exit codes).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(what) + ": dimension " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace hqc
