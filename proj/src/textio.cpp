#include "lscd/textio.hpp"

#include <charconv>
#include <fstream>
#include <unordered_set>

#include "lscd/error.hpp"

namespace lscd::textio {

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

std::string format_fixed(double value, int digits) {
  char buf[128];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, digits);
  return std::string(buf, end);
}

std::optional<double> parse_double(std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return value;
}

std::optional<long long> parse_int(std::string_view text) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::string_view, std::size_t)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    fn(line, number);
  }
  if (in.bad()) throw IoError("read error in " + path.string());
}

std::vector<std::string> read_word_list(const std::filesystem::path& path) {
  std::vector<std::string> words;
  std::unordered_set<std::string> seen;
  for_each_line(path, [&](std::string_view line, std::size_t number) {
    auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos) return;
    auto last = line.find_last_not_of(" \t");
    std::string word(line.substr(first, last - first + 1));
    if (word.find_first_of(" \t") != std::string::npos)
      throw ParseError(path.string(), number, "word contains whitespace: '" + word + "'");
    if (!seen.insert(word).second)
      throw ParseError(path.string(), number, "duplicate word '" + word + "'");
    words.push_back(std::move(word));
  });
  return words;
}

void write_word_list(const std::filesystem::path& path, const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    out += w;
    out += '\n';
  }
  write_file(path, out);
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace lscd::textio
