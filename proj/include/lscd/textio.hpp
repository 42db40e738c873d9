#pragma once

// Small text helpers shared by the file formats: line reading, splitting,
// and locale-independent number formatting/parsing.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lscd::textio {

// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

// Fixed-point with the given number of fractional digits.
std::string format_fixed(double value, int digits);

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

// Splits on a single delimiter character; empty fields are kept.
std::vector<std::string_view> split(std::string_view line, char delim);

// Calls fn(line, line_number) for every line of a plain-text file, with the
// trailing "\r" stripped. Line numbers start at 1.
void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::string_view, std::size_t)>& fn);

// One word per line; blank lines skipped, duplicates rejected.
std::vector<std::string> read_word_list(const std::filesystem::path& path);
void write_word_list(const std::filesystem::path& path, const std::vector<std::string>& words);

// Writes content atomically enough for our purposes: truncate + write + check.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace lscd::textio
