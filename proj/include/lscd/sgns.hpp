#pragma once

// Skip-gram with negative sampling, trained by plain SGD on (word, context)
// pairs with k noise contexts per pair drawn from a unigram distribution.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lscd/corpus.hpp"

namespace lscd {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Hyperparams {
  std::size_t dim = 300;
  std::size_t window = 10;
  std::size_t negatives = 5;
  double alpha = 0.025;
  double subsample = 1e-3;  // +inf disables
  std::size_t epochs = 5;
  std::uint64_t min_count = 5;
  double ns_exponent = 1.0;
  std::uint64_t seed = 1;
  bool dynamic_window = true;
  // 1 = deterministic single-threaded; >1 = lock-free parallel SGD.
  std::size_t threads = 1;

  // Throws DataError on out-of-range values.
  void validate() const;
};

struct EmbeddingMatrix {
  Vocabulary vocab;
  Matrix word_vectors;     // |V| x d
  Matrix context_vectors;  // |V| x d, empty after loading from disk

  std::size_t dim() const { return static_cast<std::size_t>(word_vectors.cols()); }
};

// Numerically stable logistic function.
inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Samples vocabulary indices with probability proportional to count^exponent.
class UnigramSampler {
 public:
  UnigramSampler(std::span<const std::uint64_t> counts, double exponent);

  std::size_t size() const { return probs_.size(); }
  double probability(WordIndex i) const { return probs_[i]; }

  template <class Rng>
  WordIndex sample(Rng& rng) const {
    const double u = uniform01(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return static_cast<WordIndex>(it - cdf_.begin());
  }

 private:
  std::vector<double> probs_;
  std::vector<double> cdf_;
};

// k independent draws; collisions with the positive context are kept.
template <class Rng>
void negative_sample(const UnigramSampler& sampler, std::size_t k, Rng& rng,
                     std::vector<WordIndex>& out) {
  out.resize(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = sampler.sample(rng);
}

// Single-pair contribution to the SGNS log-likelihood:
//   log s(v_c . v_w) + sum_i log s(-v_ci . v_w)
double pair_objective(const TrainingPair& pair, std::span<const WordIndex> negatives,
                      const EmbeddingMatrix& model);

// One gradient-ascent step on pair_objective. All coefficients are computed
// from the pre-update vectors, so the applied change equals alpha times the
// exact gradient. `grad_w` is scratch space of length d.
// Throws TrainingDivergence when a non-finite value appears.
void sgd_step(const TrainingPair& pair, std::span<const WordIndex> negatives,
              EmbeddingMatrix& model, double alpha, std::vector<double>& grad_w);

void sgd_step(const TrainingPair& pair, std::span<const WordIndex> negatives,
              EmbeddingMatrix& model, double alpha);

// Word vectors uniform in [-0.5/d, 0.5/d], context vectors zero.
EmbeddingMatrix initialize_model(Vocabulary vocab, std::size_t dim, std::uint64_t seed);

struct TrainingStats {
  std::uint64_t pairs = 0;
  std::uint64_t tokens = 0;
  double final_alpha = 0.0;
};

// Builds the vocabulary with hp.min_count and trains.
EmbeddingMatrix train_sgns(std::span<const Sentence> corpus, const Hyperparams& hp,
                           TrainingStats* stats = nullptr);

EmbeddingMatrix train_sgns(Vocabulary vocab, std::span<const Sentence> corpus,
                           const Hyperparams& hp, TrainingStats* stats = nullptr);

// Text format: "<|V|> <d>" header, then "word v1 ... vd" per row in index
// order. Word counts go to a sidecar file "<path>.vocab" so rankings that
// depend on frequency survive a round trip.
void save_embeddings(const EmbeddingMatrix& model, const std::filesystem::path& path);

// Without a sidecar, counts are synthesized from row order (|V| - i).
EmbeddingMatrix load_embeddings(const std::filesystem::path& path);

std::filesystem::path vocab_sidecar_path(const std::filesystem::path& embeddings);

}  // namespace lscd
