#include "feedsim/config.hpp"

#include <fmt/format.h>

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace feedsim {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value,
                                    const std::string& where) {
  std::vector<std::string> items;
  std::string current;
  std::istringstream stream(value);
  while (std::getline(stream, current, ',')) {
    const std::string item = trim(current);
    if (item.empty()) {
      throw ConfigError(fmt::format("{}: empty item in list '{}'", where, value));
    }
    items.push_back(item);
  }
  if (items.empty()) {
    throw ConfigError(fmt::format("{}: empty list", where));
  }
  return items;
}

double to_double(const std::string& text, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || text.empty() || errno == ERANGE) {
    throw ConfigError(fmt::format("{}: expected a number, got '{}'", where, text));
  }
  return value;
}

std::int64_t to_int(const std::string& text, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  const long long value = std::strtoll(text.c_str(), &end, 10);
  if (end != text.c_str() + text.size() || text.empty() || errno == ERANGE) {
    throw ConfigError(
        fmt::format("{}: expected an integer, got '{}'", where, text));
  }
  return value;
}

std::uint64_t to_u64(const std::string& text, const std::string& where) {
  if (text.empty() || text[0] == '-') {
    throw ConfigError(
        fmt::format("{}: expected an unsigned integer, got '{}'", where, text));
  }
  errno = 0;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(text.c_str(), &end, 10);
  if (end != text.c_str() + text.size() || errno == ERANGE) {
    throw ConfigError(
        fmt::format("{}: expected an unsigned integer, got '{}'", where, text));
  }
  return value;
}

bool to_bool(const std::string& text, const std::string& where) {
  if (text == "true" || text == "1" || text == "yes" || text == "on")
    return true;
  if (text == "false" || text == "0" || text == "no" || text == "off")
    return false;
  throw ConfigError(fmt::format("{}: expected a boolean, got '{}'", where, text));
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError(fmt::format("cannot open config file {}", path));
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config config;
  config.origin_ = origin;
  config.raw_ = text;

  std::istringstream stream(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(stream, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(
            fmt::format("{}:{}: unterminated section header", origin, lineno));
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigError(fmt::format("{}:{}: empty section name", origin, lineno));
      }
      if (config.sections_.count(section)) {
        throw ConfigError(
            fmt::format("{}:{}: duplicate section [{}]", origin, lineno, section));
      }
      config.sections_[section];
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(
          fmt::format("{}:{}: expected 'key = value' or '[section]', got '{}'",
                      origin, lineno, line));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(fmt::format("{}:{}: empty key", origin, lineno));
    }
    if (section.empty()) {
      throw ConfigError(
          fmt::format("{}:{}: key '{}' outside any section", origin, lineno, key));
    }
    auto [it, inserted] = config.sections_[section].emplace(key, value);
    (void)it;
    if (!inserted) {
      throw ConfigError(fmt::format("{}:{}: duplicate key '{}' in section [{}]",
                                    origin, lineno, key, section));
    }
  }
  return config;
}

const std::string* Config::find(const std::string& section,
                                const std::string& key) const {
  const auto sec = sections_.find(section);
  if (sec == sections_.end()) return nullptr;
  const auto it = sec->second.find(key);
  if (it == sec->second.end()) return nullptr;
  return &it->second;
}

void Config::missing(const std::string& section, const std::string& key) const {
  throw ConfigError(
      fmt::format("{}: missing required key '{}' in section [{}]", origin_, key,
                  section));
}

bool Config::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

bool Config::has_section(const std::string& section) const {
  return sections_.count(section) != 0;
}

std::string Config::get_string(const std::string& section,
                               const std::string& key) const {
  const std::string* value = find(section, key);
  if (!value) missing(section, key);
  return *value;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  const std::string* value = find(section, key);
  return value ? *value : fallback;
}

double Config::get_double(const std::string& section,
                          const std::string& key) const {
  return to_double(get_string(section, key),
                   fmt::format("{}.{}", section, key));
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  const std::string* value = find(section, key);
  if (!value) return fallback;
  return to_double(*value, fmt::format("{}.{}", section, key));
}

std::int64_t Config::get_int(const std::string& section,
                             const std::string& key) const {
  return to_int(get_string(section, key), fmt::format("{}.{}", section, key));
}

std::int64_t Config::get_int(const std::string& section, const std::string& key,
                             std::int64_t fallback) const {
  const std::string* value = find(section, key);
  if (!value) return fallback;
  return to_int(*value, fmt::format("{}.{}", section, key));
}

std::uint64_t Config::get_u64(const std::string& section, const std::string& key,
                              std::uint64_t fallback) const {
  const std::string* value = find(section, key);
  if (!value) return fallback;
  return to_u64(*value, fmt::format("{}.{}", section, key));
}

bool Config::get_bool(const std::string& section, const std::string& key,
                      bool fallback) const {
  const std::string* value = find(section, key);
  if (!value) return fallback;
  return to_bool(*value, fmt::format("{}.{}", section, key));
}

std::vector<double> Config::get_double_list(const std::string& section,
                                            const std::string& key) const {
  const std::string where = fmt::format("{}.{}", section, key);
  std::vector<double> values;
  for (const auto& item : split_list(get_string(section, key), where)) {
    values.push_back(to_double(item, where));
  }
  return values;
}

std::vector<std::int64_t> Config::get_int_list(const std::string& section,
                                               const std::string& key) const {
  const std::string where = fmt::format("{}.{}", section, key);
  std::vector<std::int64_t> values;
  for (const auto& item : split_list(get_string(section, key), where)) {
    values.push_back(to_int(item, where));
  }
  return values;
}

std::vector<std::string> Config::get_string_list(const std::string& section,
                                                 const std::string& key) const {
  return split_list(get_string(section, key),
                    fmt::format("{}.{}", section, key));
}

void Config::require_known(
    const std::map<std::string, std::set<std::string>>& schema) const {
  for (const auto& [section, keys] : sections_) {
    const auto known = schema.find(section);
    if (known == schema.end()) {
      throw ConfigError(
          fmt::format("{}: unknown section [{}]", origin_, section));
    }
    for (const auto& [key, value] : keys) {
      (void)value;
      if (!known->second.count(key)) {
        throw ConfigError(fmt::format("{}: unknown key '{}' in section [{}]",
                                      origin_, key, section));
      }
    }
  }
}

}  // namespace feedsim
