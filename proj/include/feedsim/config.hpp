#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace feedsim {

/// Raised for malformed or unknown configuration input; the command line
/// maps it to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sectioned key-value configuration:
///   [section]
///   key = value        # comment
/// Keys must live inside a section; duplicates are rejected. Lists are
/// comma-separated. Every command validates its sections and keys against a
/// schema and rejects anything it does not know.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text,
                             const std::string& origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  std::int64_t get_int(const std::string& section, const std::string& key) const;
  std::int64_t get_int(const std::string& section, const std::string& key,
                       std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::uint64_t fallback) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;
  std::vector<double> get_double_list(const std::string& section,
                                      const std::string& key) const;
  std::vector<std::int64_t> get_int_list(const std::string& section,
                                         const std::string& key) const;
  std::vector<std::string> get_string_list(const std::string& section,
                                           const std::string& key) const;

  /// Rejects sections or keys that are not in the schema.
  void require_known(
      const std::map<std::string, std::set<std::string>>& schema) const;

  /// Raw file bytes, used for hashing into output headers.
  const std::string& raw() const { return raw_; }

 private:
  std::string origin_;
  std::string raw_;
  std::map<std::string, std::map<std::string, std::string>> sections_;

  const std::string* find(const std::string& section,
                          const std::string& key) const;
  [[noreturn]] void missing(const std::string& section,
                            const std::string& key) const;
};

}  // namespace feedsim
