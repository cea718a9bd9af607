#pragma once

#include <stdexcept>
#include <string>

namespace geotrace {

enum class Errc {
  invalid_argument,
  unsupported_input,
  invalid_discriminant,
  tolerance_unreachable,
  not_in_sl2,
  instance_too_large,
  insufficient_data,
};

const char* to_string(Errc code) noexcept;

// All library failures are reported through this type; code() identifies the
// failure class independently of the message text.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace geotrace
