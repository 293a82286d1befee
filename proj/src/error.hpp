#pragma once

#include <stdexcept>
#include <string>

namespace dwk {

// Error categories aligned with the CLI exit codes:
// config_parse -> 2, config_range -> 3, numeric -> 4.
enum class ErrorCode { config_parse, config_range, numeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline Error config_parse_error(const std::string& what) {
  return Error(ErrorCode::config_parse, what);
}
inline Error config_range_error(const std::string& what) {
  return Error(ErrorCode::config_range, what);
}
inline Error numeric_error(const std::string& what) {
  return Error(ErrorCode::numeric, what);
}

}  // namespace dwk
