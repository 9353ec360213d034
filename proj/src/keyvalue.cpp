#include "fwdiss/keyvalue.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fwdiss/error.hpp"

namespace fwdiss {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

double parse_double(std::string_view text) {
  const std::string s(trim(text));
  if (s == "inf" || s == "infinity") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  if (s == "nan") return std::nan("");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw ConfigError("not a number: '" + s + "'");
  }
  return v;
}

KeyValues KeyValues::parse(std::string_view text) {
  KeyValues kv;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = trim(text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos));
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    kv.set(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse(ss.str());
}

void KeyValues::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void KeyValues::set(const std::string& key, double value) { set(key, format_double(value)); }
void KeyValues::set(const std::string& key, long long value) { set(key, std::to_string(value)); }
void KeyValues::set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }

void KeyValues::set(const std::string& key, const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  set(key, out);
}

void KeyValues::merge(const KeyValues& other) {
  for (const auto& [k, v] : other.entries_) set(k, v);
}

void KeyValues::erase_prefix(std::string_view prefix) {
  std::erase_if(entries_, [&](const auto& e) { return std::string_view(e.first).starts_with(prefix); });
}

bool KeyValues::contains(std::string_view key) const { return find(key).has_value(); }

std::optional<std::string> KeyValues::find(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string KeyValues::get_string(std::string_view key, const std::string& fallback) const {
  return find(key).value_or(fallback);
}

double KeyValues::get_double(std::string_view key, double fallback) const {
  const auto v = find(key);
  if (!v) return fallback;
  try {
    return parse_double(*v);
  } catch (const ConfigError&) {
    throw ConfigError(std::string(key) + ": expected a number, got '" + *v + "'");
  }
}

long long KeyValues::get_int(std::string_view key, long long fallback) const {
  const auto v = find(key);
  if (!v) return fallback;
  char* end = nullptr;
  errno = 0;
  const long long out = std::strtoll(v->c_str(), &end, 10);
  if (v->empty() || end != v->c_str() + v->size() || errno == ERANGE) {
    throw ConfigError(std::string(key) + ": expected an integer, got '" + *v + "'");
  }
  return out;
}

bool KeyValues::get_bool(std::string_view key, bool fallback) const {
  const auto v = find(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw ConfigError(std::string(key) + ": expected a boolean, got '" + *v + "'");
}

std::vector<double> KeyValues::get_doubles(std::string_view key, const std::vector<double>& fallback) const {
  const auto v = find(key);
  if (!v) return fallback;
  std::vector<double> out;
  std::string_view rest = *v;
  while (!trim(rest).empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    try {
      out.push_back(parse_double(item));
    } catch (const ConfigError&) {
      throw ConfigError(std::string(key) + ": bad list entry '" + std::string(item) + "'");
    }
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

std::string KeyValues::require(std::string_view key) const {
  const auto v = find(key);
  if (!v) throw ConfigError("missing required key '" + std::string(key) + "'");
  return *v;
}

std::string KeyValues::to_text() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

void KeyValues::save(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << to_text();
}

}  // namespace fwdiss
