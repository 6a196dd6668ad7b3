#include "slcomm/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "slcomm/errors.hpp"

namespace slcomm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  const std::string t = lower(text);
  if (t == "inf" || t == "infinity" || t == "+inf") {
    out = std::numeric_limits<double>::infinity();
    return true;
  }
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

ConfigDocument ConfigDocument::parse(const std::string& text, const std::string& source) {
  ConfigDocument doc;
  doc.source_ = source;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw InvalidConfig(source + ":" + std::to_string(line_no) + ": malformed section header");
      }
      section = lower(trim(line.substr(1, line.size() - 2)));
      doc.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidConfig(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw InvalidConfig(source + ":" + std::to_string(line_no) + ": empty key");
    }
    auto& sec = doc.sections_[section];
    if (sec.count(key) != 0) {
      throw InvalidConfig(source + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                          "' (first set on line " + std::to_string(sec[key].line) + ")");
    }
    sec[key] = {value, line_no};
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

const ConfigDocument::Entry* ConfigDocument::find(const std::string& section,
                                                  const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

void ConfigDocument::fail(const std::string& section, const std::string& key,
                          const std::string& what) const {
  const Entry* e = find(section, key);
  const std::string where = e != nullptr ? source_ + ":" + std::to_string(e->line) : source_;
  throw InvalidConfig(where + ": [" + section + "] " + key + ": " + what);
}

bool ConfigDocument::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

bool ConfigDocument::has_section(const std::string& section) const {
  return sections_.count(section) != 0;
}

std::vector<std::string> ConfigDocument::keys(const std::string& section) const {
  std::vector<std::string> out;
  auto s = sections_.find(section);
  if (s == sections_.end()) return out;
  for (const auto& [k, v] : s->second) out.push_back(k);
  return out;
}

std::optional<std::string> ConfigDocument::get_string(const std::string& section,
                                                      const std::string& key) const {
  const Entry* e = find(section, key);
  if (e == nullptr) return std::nullopt;
  return e->value;
}

std::optional<double> ConfigDocument::get_double(const std::string& section,
                                                 const std::string& key) const {
  const Entry* e = find(section, key);
  if (e == nullptr) return std::nullopt;
  double v = 0.0;
  if (!parse_double(e->value, v) || std::isnan(v)) {
    fail(section, key, "expected a number, got '" + e->value + "'");
  }
  return v;
}

std::optional<std::uint64_t> ConfigDocument::get_uint(const std::string& section,
                                                      const std::string& key) const {
  const Entry* e = find(section, key);
  if (e == nullptr) return std::nullopt;
  std::uint64_t v = 0;
  const char* begin = e->value.data();
  const char* end = begin + e->value.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    // Accept integral values written in floating notation, e.g. 1e4.
    double d = 0.0;
    if (parse_double(e->value, d) && d >= 0.0 && d <= 1.8e19 && std::floor(d) == d) {
      return static_cast<std::uint64_t>(d);
    }
    fail(section, key, "expected a nonnegative integer, got '" + e->value + "'");
  }
  return v;
}

std::optional<bool> ConfigDocument::get_bool(const std::string& section,
                                             const std::string& key) const {
  const Entry* e = find(section, key);
  if (e == nullptr) return std::nullopt;
  const std::string v = lower(e->value);
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  fail(section, key, "expected a boolean, got '" + e->value + "'");
}

std::optional<std::vector<double>> ConfigDocument::get_double_list(const std::string& section,
                                                                   const std::string& key) const {
  const Entry* e = find(section, key);
  if (e == nullptr) return std::nullopt;
  std::vector<double> out;
  std::stringstream ss(e->value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    double v = 0.0;
    if (!parse_double(item, v) || std::isnan(v)) {
      fail(section, key, "list item '" + item + "' is not a number");
    }
    out.push_back(v);
  }
  if (out.empty()) fail(section, key, "empty list");
  return out;
}

std::string ConfigDocument::get_string_or(const std::string& section, const std::string& key,
                                          const std::string& fallback) const {
  return get_string(section, key).value_or(fallback);
}

double ConfigDocument::get_double_or(const std::string& section, const std::string& key,
                                     double fallback) const {
  return get_double(section, key).value_or(fallback);
}

std::uint64_t ConfigDocument::get_uint_or(const std::string& section, const std::string& key,
                                          std::uint64_t fallback) const {
  return get_uint(section, key).value_or(fallback);
}

bool ConfigDocument::get_bool_or(const std::string& section, const std::string& key,
                                 bool fallback) const {
  return get_bool(section, key).value_or(fallback);
}

void ConfigDocument::require_known_keys(const std::string& section,
                                        const std::vector<std::string>& allowed) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return;
  for (const auto& [k, v] : s->second) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      fail(section, k, "unknown key");
    }
  }
}

void ConfigDocument::set(const std::string& section, const std::string& key,
                         const std::string& value) {
  sections_[lower(section)][lower(key)] = {value, 0};
}

}  // namespace slcomm
