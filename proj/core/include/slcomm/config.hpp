#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace slcomm {

/// Flat INI-style configuration: `[section]` headers and `key = value` lines.
/// `#` and `;` start comments. Every value remembers its source line so
/// errors can point at it.
class ConfigDocument {
 public:
  struct Entry {
    std::string value;
    std::size_t line = 0;
  };

  static ConfigDocument parse(const std::string& text, const std::string& source = "<config>");
  static ConfigDocument load(const std::string& path);

  [[nodiscard]] bool has(const std::string& section, const std::string& key) const;
  [[nodiscard]] bool has_section(const std::string& section) const;
  [[nodiscard]] std::vector<std::string> keys(const std::string& section) const;

  [[nodiscard]] std::optional<std::string> get_string(const std::string& section,
                                                      const std::string& key) const;
  [[nodiscard]] std::optional<double> get_double(const std::string& section,
                                                 const std::string& key) const;
  [[nodiscard]] std::optional<std::uint64_t> get_uint(const std::string& section,
                                                      const std::string& key) const;
  [[nodiscard]] std::optional<bool> get_bool(const std::string& section,
                                             const std::string& key) const;
  /// Comma-separated list of numbers.
  [[nodiscard]] std::optional<std::vector<double>> get_double_list(const std::string& section,
                                                                   const std::string& key) const;

  std::string get_string_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const;
  double get_double_or(const std::string& section, const std::string& key, double fallback) const;
  std::uint64_t get_uint_or(const std::string& section, const std::string& key,
                            std::uint64_t fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;

  /// Throws InvalidConfig naming the first key in `section` not listed in `allowed`.
  void require_known_keys(const std::string& section, const std::vector<std::string>& allowed) const;

  void set(const std::string& section, const std::string& key, const std::string& value);

  [[nodiscard]] const std::string& source() const noexcept { return source_; }

 private:
  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& what) const;
  const Entry* find(const std::string& section, const std::string& key) const;

  std::string source_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

}  // namespace slcomm
