#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spcdrift {

/// Formats a double with 17 significant digits (lossless round-trip).
std::string format_real(double value);

/// Parses a decimal or scientific-notation real. Returns nullopt when the
/// whole field is not a number.
std::optional<double> parse_real(std::string_view text);

std::optional<long long> parse_integer(std::string_view text);

/// Splits one CSV line on commas. Quoting is not supported; fields are trimmed
/// of surrounding whitespace and a trailing '\r'.
std::vector<std::string> split_csv_line(std::string_view line);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace spcdrift
