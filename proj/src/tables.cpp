#include "lscd/tables.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "lscd/error.hpp"
#include "lscd/textio.hpp"

namespace lscd {

void sort_ranking(std::vector<WordScore>& scores) {
  std::sort(scores.begin(), scores.end(), [](const WordScore& a, const WordScore& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
}

void write_scores(const std::filesystem::path& path, const std::vector<WordScore>& scores) {
  std::string out;
  for (const auto& [w, s] : scores) out += w + "\t" + textio::format_double(s) + "\n";
  textio::write_file(path, out);
}

namespace {

std::pair<std::string_view, std::string_view> two_fields(std::string_view line, const std::string& file,
                                                         std::size_t number) {
  auto f = textio::split(line, '\t');
  if (f.size() != 2 || f[0].empty())
    throw ParseError(file, number, "expected 'word<TAB>value'");
  return {f[0], f[1]};
}

}  // namespace

std::vector<WordScore> read_scores(const std::filesystem::path& path) {
  std::vector<WordScore> out;
  std::unordered_set<std::string> seen;
  const std::string name = path.string();
  textio::for_each_line(path, [&](std::string_view line, std::size_t number) {
    if (line.empty()) return;
    auto [w, v] = two_fields(line, name, number);
    auto score = textio::parse_double(v);
    if (!score || std::isnan(*score)) throw ParseError(name, number, "bad score '" + std::string(v) + "'");
    if (!seen.emplace(w).second) throw ParseError(name, number, "duplicate word '" + std::string(w) + "'");
    out.emplace_back(std::string(w), *score);
  });
  return out;
}

void write_labels(const std::filesystem::path& path, const std::vector<WordLabel>& labels) {
  std::string out;
  for (const auto& [w, l] : labels) out += w + "\t" + std::to_string(l) + "\n";
  textio::write_file(path, out);
}

std::vector<WordLabel> read_labels(const std::filesystem::path& path) {
  std::vector<WordLabel> out;
  std::unordered_set<std::string> seen;
  const std::string name = path.string();
  textio::for_each_line(path, [&](std::string_view line, std::size_t number) {
    if (line.empty()) return;
    auto [w, v] = two_fields(line, name, number);
    if (v != "0" && v != "1") throw ParseError(name, number, "label must be 0 or 1, got '" + std::string(v) + "'");
    if (!seen.emplace(w).second) throw ParseError(name, number, "duplicate word '" + std::string(w) + "'");
    out.emplace_back(std::string(w), v == "1" ? 1 : 0);
  });
  return out;
}

void write_key_values(const std::filesystem::path& path, const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + "\t" + v + "\n";
  textio::write_file(path, out);
}

KeyValues read_key_values(const std::filesystem::path& path) {
  KeyValues kv;
  const std::string name = path.string();
  textio::for_each_line(path, [&](std::string_view line, std::size_t number) {
    if (line.empty()) return;
    auto [k, v] = two_fields(line, name, number);
    kv.emplace_back(std::string(k), std::string(v));
  });
  return kv;
}

const std::string* find_value(const KeyValues& kv, const std::string& key) {
  for (const auto& [k, v] : kv)
    if (k == key) return &v;
  return nullptr;
}

}  // namespace lscd
