#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gridpath/common.hpp"

namespace gridpath::io {

// Flat `key = value` configuration text: one pair per line, full-line `#`
// comments, blank lines ignored. Duplicate keys are rejected.
class KvFile {
 public:
  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int_or(const std::string& key, long long fallback) const;
  std::uint64_t get_u64_or(const std::string& key,
                           std::uint64_t fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;

  // Replaces an existing key or appends a new one (used by --set overrides).
  void set(const std::string& key, const std::string& value);

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

  // File-order rendering, one `key = value` per line.
  std::string serialize() const;

  // Order-independent content hash of the resolved pairs.
  std::uint64_t fingerprint() const;

  void append_checked(const std::string& key, const std::string& value);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

KvFile parse_kv(const std::string& text);
KvFile load_kv(const std::string& path);
void save_text(const std::string& path, const std::string& text);
std::string load_text(const std::string& path);

}  // namespace gridpath::io
