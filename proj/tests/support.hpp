#pragma once

#include <optional>

#include "geotrace/error.hpp"

namespace test {

// Code of the geotrace::Error thrown by f, or nullopt when f returns.
template <class F>
std::optional<geotrace::Errc> error_code(F&& f) {
  try {
    f();
  } catch (const geotrace::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace test
