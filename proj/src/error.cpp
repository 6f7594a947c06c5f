#include "corrsync/error.hpp"

namespace corrsync {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::shape_mismatch: return "shape_mismatch";
    case Errc::out_of_range: return "out_of_range";
    case Errc::io: return "io";
    case Errc::format: return "format";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error("[" + std::string(errc_name(code)) + "] " + what), code_(code) {}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace corrsync
