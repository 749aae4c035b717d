#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace fhmdp {

// Shortest decimal string that round-trips to the same double. Keeps text
// artifacts reproducible byte-for-byte and recomputable without loss.
inline std::string format_double(double v) {
  char buf[32];
  std::to_chars_result r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

}  // namespace fhmdp
