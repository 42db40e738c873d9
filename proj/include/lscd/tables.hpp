#pragma once

// Two-column TSV tables shared by the scoring, baseline and evaluation
// stages: `word<TAB>score` and `word<TAB>{0|1}`.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace lscd {

using WordScore = std::pair<std::string, double>;
using WordLabel = std::pair<std::string, int>;

// Descending by score, ties by word, as written to score files.
void sort_ranking(std::vector<WordScore>& scores);

void write_scores(const std::filesystem::path& path, const std::vector<WordScore>& scores);
std::vector<WordScore> read_scores(const std::filesystem::path& path);

void write_labels(const std::filesystem::path& path, const std::vector<WordLabel>& labels);
// Duplicate words and labels outside {0,1} are ParseErrors with line numbers.
std::vector<WordLabel> read_labels(const std::filesystem::path& path);

// Key/value TSV (`key<TAB>value`), order preserved.
using KeyValues = std::vector<std::pair<std::string, std::string>>;
void write_key_values(const std::filesystem::path& path, const KeyValues& kv);
KeyValues read_key_values(const std::filesystem::path& path);
const std::string* find_value(const KeyValues& kv, const std::string& key);

}  // namespace lscd
