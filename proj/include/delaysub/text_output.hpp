#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace delaysub {

/// %.17g: enough digits to round-trip any double.
std::string format_full(double v);
/// d.dddde+XX, the tables' 5 significant digits.
std::string format_sci5(double v);
std::string format_fixed(double v, int decimals);

std::string csv_escape(const std::string& field);
std::string csv_line(const std::vector<std::string>& fields);  // with trailing '\n'
/// RFC-4180 records; quoted fields may contain commas, quotes ("") and newlines.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

/// Write the whole file in one go (creating parent directories).
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace delaysub
