#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>

namespace nongauss {

/// Shortest round-trip decimal form, independent of the C locale.
[[nodiscard]] inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

/// Locale-independent decimal parse; the whole field must be consumed.
[[nodiscard]] inline std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

}  // namespace nongauss
