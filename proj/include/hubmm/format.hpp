#ifndef HUBMM_FORMAT_HPP
#define HUBMM_FORMAT_HPP

#include <charconv>
#include <string>
#include <system_error>

namespace hubmm {

// Shortest round-trip decimal form with '.' as separator in every locale.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc())
    return "nan";
  return std::string(buf, res.ptr);
}

} // namespace hubmm

#endif // HUBMM_FORMAT_HPP
