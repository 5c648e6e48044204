#ifndef STP_FORMAT_HPP
#define STP_FORMAT_HPP

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

namespace stp {

// Shortest decimal that parses back to the same double. Infinities print as inf/-inf.
inline std::string format_real(double x)
{
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

// Accepts everything format_real emits. Returns false on trailing garbage.
inline bool parse_real(std::string_view s, double& out)
{
  if (s == "inf") { out = INFINITY; return true; }
  if (s == "-inf") { out = -INFINITY; return true; }
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace stp

#endif  // STP_FORMAT_HPP
