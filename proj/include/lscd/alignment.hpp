#pragma once

// Putting two independently trained spaces into one coordinate system:
// vocabulary intersection, normalize/center preprocessing, and the
// orthogonal Procrustes map W* = argmin_{W in O(d)} ||B W - A||_F.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "lscd/sgns.hpp"

namespace lscd {

// Words present in both vocabularies, in descending joint count
// (count_A + count_B), ties lexicographic.
struct SharedVocabMap {
  std::vector<std::string> words;
  std::vector<WordIndex> rows_a;
  std::vector<WordIndex> rows_b;

  std::size_t size() const { return words.size(); }
};

struct OrthogonalMap {
  Matrix w;  // d x d
};

struct AlignOptions {
  bool normalize = true;
  bool center = true;
  bool renormalize = true;
  // Fit W* on the first n shared rows only (0 = all); all rows are mapped.
  std::size_t fit_top_n = 0;
};

struct AlignedPair {
  Matrix a;  // preprocessed A over shared rows
  Matrix b;  // preprocessed B over shared rows, times W*
  SharedVocabMap map;
  OrthogonalMap w;
  std::size_t zero_rows = 0;  // rows left at zero by normalization
};

// Scales each nonzero row to unit length; zero rows stay zero and are
// counted in `zero_rows` when given.
Matrix length_normalize(const Matrix& m, std::size_t* zero_rows = nullptr);

// Subtracts the column means. Throws DataError for an empty matrix.
Matrix mean_center(const Matrix& m);

// Throws DataError("no shared vocabulary") on an empty intersection.
SharedVocabMap intersect_vocab(const EmbeddingMatrix& a, const EmbeddingMatrix& b);

// Solves via SVD of BᵀA = U S Vᵀ, W* = U Vᵀ. Throws NumericError on
// non-finite input or a failed decomposition.
OrthogonalMap orthogonal_procrustes(const Matrix& a, const Matrix& b);

// ||B W - A||_F
double procrustes_residual(const Matrix& a, const Matrix& b, const Matrix& w);

AlignedPair align(const EmbeddingMatrix& a, const EmbeddingMatrix& b, const AlignOptions& opts = {});

// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the sign
// of R's diagonal folded into Q).
Matrix random_orthogonal(std::size_t d, std::mt19937_64& rng);

// d lines of d space-separated values.
void save_matrix(const Matrix& m, const std::filesystem::path& path);
Matrix load_matrix(const std::filesystem::path& path);

// Aligned matrices persist in the embedding text format over the shared
// vocabulary, so `score` can read them back.
EmbeddingMatrix aligned_side(const AlignedPair& pair, const EmbeddingMatrix& source, bool side_a);

}  // namespace lscd
