#pragma once

#include <stdexcept>
#include <string>

namespace rail {

enum class Errc {
  invalid_order,
  invalid_count,
  dimension,
  invalid_config,
  invalid_delay,
  undefined_snr,
  degenerate_geometry,
  invalid_range,
  out_of_room,
  invalid_parameter,
  geometry,
  io,
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::invalid_order: return "invalid-order";
    case Errc::invalid_count: return "invalid-count";
    case Errc::dimension: return "dimension";
    case Errc::invalid_config: return "invalid-config";
    case Errc::invalid_delay: return "invalid-delay";
    case Errc::undefined_snr: return "undefined-snr";
    case Errc::degenerate_geometry: return "degenerate-geometry";
    case Errc::invalid_range: return "invalid-range";
    case Errc::out_of_room: return "out-of-room";
    case Errc::invalid_parameter: return "invalid-parameter";
    case Errc::geometry: return "geometry";
    case Errc::io: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the Errc categories so
/// callers (the CLI in particular) can map it onto a stable exit code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace rail
