#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fwdiss {

/// Ordered flat `section.key = value` text. Blank lines and lines starting
/// with '#' are ignored; later assignments override earlier ones.
class KeyValues {
 public:
  KeyValues() = default;

  [[nodiscard]] static KeyValues parse(std::string_view text);
  [[nodiscard]] static KeyValues load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value);
  void set(const std::string& key, bool value);
  void set(const std::string& key, const std::vector<double>& values);
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }
  void set(const std::string& key, int value) { set(key, static_cast<long long>(value)); }
  void set(const std::string& key, std::size_t value) { set(key, static_cast<long long>(value)); }

  /// Copies every entry of `other`, overriding existing keys.
  void merge(const KeyValues& other);
  void erase_prefix(std::string_view prefix);

  [[nodiscard]] bool contains(std::string_view key) const;
  [[nodiscard]] std::optional<std::string> find(std::string_view key) const;

  /// Typed getters; a present but malformed value throws ConfigError.
  [[nodiscard]] std::string get_string(std::string_view key, const std::string& fallback) const;
  [[nodiscard]] double get_double(std::string_view key, double fallback) const;
  [[nodiscard]] long long get_int(std::string_view key, long long fallback) const;
  [[nodiscard]] bool get_bool(std::string_view key, bool fallback) const;
  [[nodiscard]] std::vector<double> get_doubles(std::string_view key,
                                                const std::vector<double>& fallback) const;
  /// Throws ConfigError when absent.
  [[nodiscard]] std::string require(std::string_view key) const;

  [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& entries() const noexcept {
    return entries_;
  }
  [[nodiscard]] std::string to_text() const;
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Shortest round-trip decimal text for a double ("%.17g", with inf/nan spelled out).
[[nodiscard]] std::string format_double(double value);
[[nodiscard]] double parse_double(std::string_view text);

}  // namespace fwdiss
