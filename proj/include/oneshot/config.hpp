#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

namespace oneshot {

/// Flat key=value file: one pair per line, '#' starts a comment, blank lines
/// ignored. Keys unknown to the consumer are rejected at validation time.
class KeyValueConfig {
 public:
  static KeyValueConfig from_file(const std::string& path);
  static KeyValueConfig from_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// Throws if the file contains keys outside `known`.
  void require_known_keys(const std::set<std::string>& known) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
  std::string origin_;
};

}  // namespace oneshot
