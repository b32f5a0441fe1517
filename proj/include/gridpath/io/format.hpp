#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>

#include "gridpath/common.hpp"

namespace gridpath::io {

// Shortest decimal form that parses back to the identical double. Using one
// formatter everywhere is what makes re-serialized artifacts byte-identical.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string format_int(long long v) {
  char buf[24];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Strict full-token parses; the `what` tag names the field in error messages.
inline double parse_double(std::string_view tok, const std::string& what) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw DataError(what + ": not a number: '" + std::string(tok) + "'");
  return v;
}

inline long long parse_int(std::string_view tok, const std::string& what) {
  long long v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw DataError(what + ": not an integer: '" + std::string(tok) + "'");
  return v;
}

inline std::uint64_t parse_u64(std::string_view tok, const std::string& what) {
  std::uint64_t v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw DataError(what + ": not an unsigned integer: '" + std::string(tok) +
                    "'");
  return v;
}

}  // namespace gridpath::io
