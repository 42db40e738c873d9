#pragma once

// Synthetic diachronic corpus pairs with known change. Words belong to topic
// clusters and sit at fixed positions on a ring inside their cluster. Every
// sentence picks a cluster and a ring center and draws words near that center,
// so each word has its own context distribution. Pseudoword targets are
// planted into sentences at a fixed ring center of a chosen cluster: unchanged
// targets use the same cluster in both corpora, changed targets move a
// fraction `mix` of their C2 occurrences to a different cluster.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lscd/corpus.hpp"
#include "lscd/tables.hpp"

namespace lscd {

struct SynthTarget {
  std::string word;
  bool changed = false;
  double mix = 0.0;  // share of C2 occurrences drawn from the new cluster
};

struct SynthSpec {
  std::size_t vocab_size = 2000;
  std::size_t sentences = 50000;  // per corpus, target sentences included
  std::size_t min_length = 6;
  std::size_t max_length = 14;
  std::size_t clusters = 4;
  double zipf_exponent = 1.0;
  double ring_width = 0.05;     // Gaussian kernel width on the unit ring; 0 = flat clusters
  std::size_t ring_bins = 200;  // discretization of sentence centers
  double background = 0.3;      // share of tokens drawn vocabulary-wide, ignoring topic
  std::size_t target_occurrences = 250;  // per target per corpus
  std::vector<SynthTarget> targets;

  // 10 targets "pw00".."pw09", the first 5 changed with mix 1.
  static SynthSpec defaults();

  // Throws DataError describing the first inconsistency.
  void validate() const;
};

struct ChiSquareCheck {
  std::string word;
  double statistic = 0.0;
  std::size_t dof = 0;
  bool ok = true;  // |z| of the normal approximation below 6
};

struct SynthCorpora {
  Corpus c1;
  Corpus c2;
  std::vector<std::string> targets;
  std::vector<WordLabel> gold;
  std::vector<ChiSquareCheck> checks;  // one per unchanged target
};

SynthCorpora generate(const SynthSpec& spec, std::uint64_t seed);

struct SynthFiles {
  std::filesystem::path corpus1, corpus2, targets, gold;
};

// Writes c1.txt, c2.txt, targets.txt, gold.tsv into `dir`.
SynthFiles write_synth(const SynthCorpora& data, const std::filesystem::path& dir);

}  // namespace lscd
