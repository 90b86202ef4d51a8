#pragma once

#include <stdexcept>
#include <string>

namespace tlp {

// Coarse failure classes. The CLI maps these onto single-line
// machine-parsable diagnostics and a nonzero exit code.
enum class ErrorClass { config, data, estimation, io };

inline const char* error_class_name(ErrorClass c) {
  switch (c) {
    case ErrorClass::config: return "config_error";
    case ErrorClass::data: return "data_error";
    case ErrorClass::estimation: return "estimation_error";
    case ErrorClass::io: return "io_error";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& msg)
      : std::runtime_error(msg), cls_(cls) {}
  ErrorClass cls() const { return cls_; }

 private:
  ErrorClass cls_;
};

inline Error config_error(const std::string& msg) { return Error(ErrorClass::config, msg); }
inline Error data_error(const std::string& msg) { return Error(ErrorClass::data, msg); }
inline Error estimation_error(const std::string& msg) { return Error(ErrorClass::estimation, msg); }
inline Error io_error(const std::string& msg) { return Error(ErrorClass::io, msg); }

}  // namespace tlp
