#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace corrsync {

enum class Errc {
  invalid_argument = 1,
  shape_mismatch = 2,
  out_of_range = 3,
  io = 4,
  format = 5,
};

std::string_view errc_name(Errc code) noexcept;

// Every failure surfaced by the library is an Error; the code survives
// formatting so callers across a language boundary can recover it.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

inline void require(bool cond, Errc code, const char* what) {
  if (!cond) fail(code, what);
}

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace corrsync
