#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace epl {

/// Shortest round-trip decimal form of a double (std::to_chars general format).
std::string format_double(double value);

/// Parses a double, rejecting trailing junk and empty fields.
double parse_double(const std::string& field, const std::string& context);

/// Parses a non-negative integer.
std::uint64_t parse_uint(const std::string& field, const std::string& context);

/// Splits one CSV line on commas. No quoting: none of the formats need it.
std::vector<std::string> split_csv_line(const std::string& line);

/// Reads a whole file as lines, tolerating a trailing newline. Throws io errors.
std::vector<std::string> read_lines(const std::string& path);

/// Writes content atomically enough for our purposes (single write, LF endings).
void write_file(const std::string& path, const std::string& content);

/// FNV-1a 64-bit hash of a byte string, as fixed-width hex. Used for manifests.
std::string content_hash_hex(const std::string& bytes);

} // namespace epl
