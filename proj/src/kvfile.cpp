#include "mis/kvfile.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mis/errors.hpp"

namespace mis {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

KvFile KvFile::parse(std::string_view text) {
  KvFile out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.back() == ';') line = trim(line.substr(0, line.size() - 1));
    if (line.substr(0, 6) == "param ") line = trim(line.substr(6));

    std::size_t eq = line.find(":=");
    std::size_t skip = 2;
    if (eq == std::string_view::npos) {
      eq = line.find('=');
      skip = 1;
    }
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
    const auto key = std::string(trim(line.substr(0, eq)));
    const auto value = std::string(trim(line.substr(eq + skip)));
    if (key.empty()) throw ParseError(line_no, "empty key");
    if (out.values_.count(key)) throw ParseError(line_no, "duplicate key '" + key + "'");
    out.values_[key] = value;
    out.lines_[key] = line_no;
  }
  return out;
}

KvFile KvFile::read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.message());
  }
}

std::optional<std::string> KvFile::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

int KvFile::line_of(const std::string& key) const {
  auto it = lines_.find(key);
  return it == lines_.end() ? 0 : it->second;
}

double KvFile::number(const std::string& key) const {
  auto v = get(key);
  if (!v) throw ParseError(0, "missing key '" + key + "'");
  const char* begin = v->c_str();
  char* end = nullptr;
  const double d = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw ParseError(line_of(key), "'" + key + "' is not a number: " + *v);
  return d;
}

double KvFile::number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

long long KvFile::integer(const std::string& key) const {
  auto v = get(key);
  if (!v) throw ParseError(0, "missing key '" + key + "'");
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size())
    throw ParseError(line_of(key), "'" + key + "' is not an integer: " + *v);
  return out;
}

long long KvFile::integer(const std::string& key, long long fallback) const {
  return has(key) ? integer(key) : fallback;
}

bool KvFile::flag(const std::string& key, bool fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  if (*v == "1" || *v == "true" || *v == "yes" || *v == "on") return true;
  if (*v == "0" || *v == "false" || *v == "no" || *v == "off") return false;
  throw ParseError(line_of(key), "'" + key + "' is not a boolean: " + *v);
}

std::string KvFile::to_string() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace mis
