#pragma once

// Reference baselines: absolute frequency difference, bag-of-words
// co-occurrence vectors compared by cosine distance, and majority class.

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lscd/change.hpp"
#include "lscd/corpus.hpp"
#include "lscd/tables.hpp"

namespace lscd {

enum class BaselineKind { Frequency, Collocation, Majority };

BaselineKind parse_baseline(const std::string& s);  // freq | colloc | majority
const char* to_string(BaselineKind k);

// |c1/N1 - c2/N2| * 1e6, or |c1 - c2| with raw_counts.
double frequency_score(std::uint64_t c1, std::uint64_t n1, std::uint64_t c2, std::uint64_t n2,
                       bool raw_counts = false);

// Target-list order; absent words count as 0.
std::vector<WordScore> frequency_baseline(const CorpusStats& stats,
                                          const std::vector<std::string>& targets,
                                          bool raw_counts = false);

// Scores for every word seen in either corpus (the distribution used when a
// frequency threshold is needed), descending.
std::vector<WordScore> frequency_scores_all(const CorpusStats& stats, bool raw_counts = false);

// Sparse context-count vector over a column vocabulary shared by both corpora.
using CountVector = std::unordered_map<WordIndex, std::uint64_t>;

double cosine_distance(const CountVector& a, const CountVector& b);

struct CollocationResult {
  std::vector<WordScore> scores;  // target-list order, scored targets only
  std::vector<MissingTarget> missing;
  std::unordered_map<std::string, std::pair<CountVector, CountVector>> vectors;
};

// Symmetric fixed window, raw counts, no subsampling, no alignment.
CollocationResult collocation_baseline(std::span<const Sentence> c1, std::span<const Sentence> c2,
                                       const std::vector<std::string>& targets, std::size_t window);

std::vector<WordScore> majority_baseline(const std::vector<std::string>& targets);

}  // namespace lscd
