#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace mis {

/// Flat "key = value" text: one pair per line, '#' comments, blank lines
/// ignored. A trailing ';' and a leading "param " are tolerated so AMPL-style
/// parameter blocks paste in unchanged.
class KvFile {
 public:
  static KvFile parse(std::string_view text);
  static KvFile read(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& entries() const { return values_; }

  std::optional<std::string> get(const std::string& key) const;
  /// Throw ParseError naming the key and its line when the value is missing
  /// (for the non-defaulted forms) or malformed.
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  long long integer(const std::string& key) const;
  long long integer(const std::string& key, long long fallback) const;
  bool flag(const std::string& key, bool fallback) const;

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  std::string to_string() const;

 private:
  int line_of(const std::string& key) const;

  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
};

/// Shortest decimal text that round-trips the double exactly.
std::string format_double(double v);

}  // namespace mis
