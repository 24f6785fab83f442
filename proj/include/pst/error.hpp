#pragma once

#include <stdexcept>
#include <string>

namespace pst {

enum class Errc {
  invalid_size,
  invalid_parameter,
  unsupported_order,
  empty_domain,
  invalid_index,
  format,
  corrupt_file,
  io,
  parse,
};

inline const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_size: return "invalid size";
    case Errc::invalid_parameter: return "invalid parameter";
    case Errc::unsupported_order: return "unsupported order";
    case Errc::empty_domain: return "empty domain";
    case Errc::invalid_index: return "invalid index";
    case Errc::format: return "unknown format";
    case Errc::corrupt_file: return "corrupt file";
    case Errc::io: return "i/o error";
    case Errc::parse: return "parse error";
  }
  return "error";
}

/// Every failure raised by the library carries one of the Errc categories.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

namespace detail {

[[noreturn]] inline void fail(Errc code, const std::string& message) { throw Error(code, message); }

inline void require(bool condition, Errc code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace detail
}  // namespace pst
