#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace pipeline {

/// Shortest round-trip decimal rendering of a double (std::to_chars).
std::string format_double(double value);

/// Empty cell for absent optional values.
std::string format_cell(const std::optional<double>& value);
std::string format_cell(const std::optional<int>& value);

/// FNV-1a 64-bit content checksum, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace pipeline
