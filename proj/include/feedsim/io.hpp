#pragma once

#include <cstdint>
#include <string>

namespace feedsim {

constexpr const char* kVersion = "0.1.0";

/// Shortest round-trip decimal form; integers print without an exponent.
std::string format_number(double value);

/// FNV-1a over the bytes, for tagging outputs with their config.
std::uint64_t fnv1a64(const std::string& bytes);

/// Standard header comment placed at the top of generated files:
/// "# feedsim <version> seed=<seed> config=<hash>".
std::string output_header(std::uint64_t seed, std::uint64_t config_hash);

/// Writes text to path, creating parent directories. Throws on failure.
void write_text_file(const std::string& path, const std::string& text);

/// Reads a whole file; throws on failure.
std::string read_text_file(const std::string& path);

}  // namespace feedsim
