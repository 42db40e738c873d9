#pragma once

// Corpus ingestion: sentence streams, vocabularies, frequent-word
// subsampling and symmetric-window (word, context) pair extraction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lscd {

using WordIndex = std::uint32_t;

struct Sentence {
  std::vector<std::string> tokens;
};

using Corpus = std::vector<Sentence>;

enum class CorpusFormat { Auto, Plain, Gzip };

// Streams sentences from a one-sentence-per-line file. Empty lines are
// skipped; lines that are not valid UTF-8 raise a ParseError naming the line.
class CorpusReader {
 public:
  CorpusReader(const std::filesystem::path& path, CorpusFormat format = CorpusFormat::Auto);
  ~CorpusReader();
  CorpusReader(CorpusReader&&) noexcept;
  CorpusReader& operator=(CorpusReader&&) noexcept;

  // Returns false at end of file.
  bool next(Sentence& out);

  std::size_t line_number() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format = CorpusFormat::Auto);

void save_corpus(const std::filesystem::path& path, const Corpus& corpus);

class Vocabulary {
 public:
  static constexpr WordIndex npos = std::numeric_limits<WordIndex>::max();

  Vocabulary() = default;

  // Entries must already satisfy the invariants: unique words, count >= min_count,
  // total_tokens >= sum of counts.
  Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts,
             std::uint64_t total_tokens, std::uint64_t min_count);

  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

  const std::string& word(WordIndex i) const { return words_[i]; }
  std::uint64_t count(WordIndex i) const { return counts_[i]; }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }

  // npos when absent.
  WordIndex find(std::string_view w) const;
  bool contains(std::string_view w) const { return find(w) != npos; }

  std::uint64_t total_tokens() const { return total_tokens_; }
  std::uint64_t min_count() const { return min_count_; }

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, WordIndex> index_;
  std::uint64_t total_tokens_ = 0;
  std::uint64_t min_count_ = 1;
};

// Index order is descending count, ties broken lexicographically.
// Throws DataError("empty vocabulary") if nothing survives min_count.
Vocabulary build_vocabulary(std::span<const Sentence> corpus, std::uint64_t min_count);

// min(1, sqrt(t / f)). Throws std::domain_error for f <= 0 or t <= 0.
// t = +inf disables subsampling (always 1).
double subsample_keep_probability(double f, double t);

struct TrainingPair {
  WordIndex word;
  WordIndex context;

  friend bool operator==(const TrainingPair&, const TrainingPair&) = default;
};

// Uniform double in [0, 1) from the top 53 bits of a 64-bit generator.
template <class Rng>
double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct WindowOptions {
  std::size_t window = 10;
  bool dynamic = true;  // effective window uniform in 1..window
};

// Drops out-of-vocabulary tokens.
std::vector<WordIndex> encode(const Sentence& sentence, const Vocabulary& vocab);

// Per-word keep probabilities with f = count / total_tokens.
std::vector<double> keep_probabilities(const Vocabulary& vocab, double t);

// Core pair generator over an already encoded sentence. Subsampling draws one
// uniform per token whose keep probability is below 1; the dynamic window
// draws one value per surviving position. Pairs are appended to `out`.
template <class Rng>
void extract_pairs_encoded(std::span<const WordIndex> ids, std::span<const double> keep,
                           const WindowOptions& opts, Rng& rng, std::vector<TrainingPair>& out,
                           std::vector<WordIndex>& scratch) {
  scratch.clear();
  for (WordIndex id : ids) {
    double p = keep[id];
    if (p < 1.0 && uniform01(rng) >= p) continue;
    scratch.push_back(id);
  }
  const std::size_t n = scratch.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t b = opts.window;
    if (opts.dynamic && opts.window > 1) b = 1 + static_cast<std::size_t>(rng() % opts.window);
    std::size_t lo = i >= b ? i - b : 0;
    std::size_t hi = std::min(n - 1, i + b);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j == i) continue;
      out.push_back({scratch[i], scratch[j]});
    }
  }
}

template <class Rng>
std::vector<TrainingPair> extract_pairs(const Sentence& sentence, const Vocabulary& vocab,
                                        const WindowOptions& opts, double t, Rng& rng) {
  auto ids = encode(sentence, vocab);
  auto keep = keep_probabilities(vocab, t);
  std::vector<TrainingPair> out;
  std::vector<WordIndex> scratch;
  extract_pairs_encoded(std::span<const WordIndex>(ids), std::span<const double>(keep), opts, rng,
                        out, scratch);
  return out;
}

// Raw token counts (no frequency floor) for both corpora of a comparison.
struct CorpusStats {
  std::unordered_map<std::string, std::uint64_t> counts1;
  std::unordered_map<std::string, std::uint64_t> counts2;
  std::uint64_t size1 = 0;
  std::uint64_t size2 = 0;

  std::uint64_t count1(const std::string& w) const;
  std::uint64_t count2(const std::string& w) const;
};

std::unordered_map<std::string, std::uint64_t> count_tokens(std::span<const Sentence> corpus,
                                                            std::uint64_t* total = nullptr);

CorpusStats corpus_stats(std::span<const Sentence> c1, std::span<const Sentence> c2);

}  // namespace lscd
