#include "gridpath/io/kv.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "gridpath/io/format.hpp"

namespace gridpath::io {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                    c == '.' || c == '-';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

bool KvFile::has(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return true;
  return false;
}

const std::string& KvFile::get(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  throw ConfigError("missing required config key '" + key + "'");
}

std::string KvFile::get_or(const std::string& key,
                           const std::string& fallback) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  return fallback;
}

double KvFile::get_double(const std::string& key) const {
  try {
    return parse_double(get(key), key);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
}

double KvFile::get_double_or(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long KvFile::get_int(const std::string& key) const {
  try {
    return parse_int(get(key), key);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
}

long long KvFile::get_int_or(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t KvFile::get_u64_or(const std::string& key,
                                 std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  try {
    return parse_u64(get(key), key);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
}

bool KvFile::get_bool_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = get(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

void KvFile::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw ConfigError("invalid config key '" + key + "'");
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void KvFile::append_checked(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw ConfigError("invalid config key '" + key + "'");
  if (has(key)) throw ConfigError("duplicate config key '" + key + "'");
  entries_.emplace_back(key, value);
}

std::string KvFile::serialize() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

std::uint64_t KvFile::fingerprint() const {
  std::vector<std::pair<std::string, std::string>> sorted = entries_;
  std::sort(sorted.begin(), sorted.end());
  std::uint64_t h = 14695981039346656037ull;
  for (const auto& [k, v] : sorted) {
    h = fnv1a64(k, h);
    h = fnv1a64("=", h);
    h = fnv1a64(v, h);
    h = fnv1a64("\n", h);
  }
  return h;
}

KvFile parse_kv(const std::string& text) {
  KvFile kv;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected 'key = value', got '" + t + "'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (!valid_key(key))
      throw ConfigError("line " + std::to_string(lineno) +
                        ": invalid key '" + key + "'");
    if (kv.has(key))
      throw ConfigError("line " + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
    kv.append_checked(key, value);
  }
  return kv;
}

std::string load_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << text;
  if (!out) throw ConfigError("write failed: " + path);
}

KvFile load_kv(const std::string& path) { return parse_kv(load_text(path)); }

}  // namespace gridpath::io
