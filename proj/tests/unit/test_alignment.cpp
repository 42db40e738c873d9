#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lscd/alignment.hpp"
#include "lscd/change.hpp"
#include "lscd/error.hpp"
#include "test_util.hpp"

using namespace lscd;

namespace {

Matrix gaussian(Eigen::Index n, Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, d);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

EmbeddingMatrix embedding(const std::vector<std::string>& words, std::vector<std::uint64_t> counts, Matrix vectors) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  EmbeddingMatrix e;
  e.vocab = Vocabulary(words, std::move(counts), total, 1);
  e.word_vectors = std::move(vectors);
  return e;
}

EmbeddingMatrix random_embedding(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  for (std::size_t i = 0; i < n; ++i) {
    words.push_back("w" + std::to_string(i));
    counts.push_back(n - i + 10);
  }
  return embedding(words, counts, gaussian(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d), rng));
}

std::vector<double> row_distances(const AlignedPair& p) {
  std::vector<double> out;
  const auto d = static_cast<std::size_t>(p.a.cols());
  for (Eigen::Index i = 0; i < p.a.rows(); ++i)
    out.push_back(cosine_distance(std::span<const double>(p.a.row(i).data(), d),
                                  std::span<const double>(p.b.row(i).data(), d)));
  return out;
}

}  // namespace

TEST_CASE("length_normalize") {
  Matrix m(3, 2);
  m << 3, 4, 0, 0, 0.6, 0.8;
  std::size_t zeros = 0;
  Matrix n = length_normalize(m, &zeros);
  CHECK(n(0, 0) == doctest::Approx(0.6));
  CHECK(n(0, 1) == doctest::Approx(0.8));
  CHECK(n.row(1).isZero(0.0));
  CHECK(zeros == 1);
  CHECK((n.row(2) - m.row(2)).cwiseAbs().maxCoeff() < 1e-12);
  Matrix again = length_normalize(n);
  CHECK((again - n).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mean_center") {
  Matrix same(3, 2);
  same << 1, 2, 1, 2, 1, 2;
  CHECK(mean_center(same).isZero(0.0));

  Matrix sym(2, 2);
  sym << 1, 0, -1, 0;
  CHECK(mean_center(sym) == sym);

  Matrix m(2, 2);
  m << 1, 2, 3, 4;
  Matrix expected(2, 2);
  expected << -1, -1, 1, 1;
  CHECK(mean_center(m) == expected);

  std::mt19937_64 rng(3);
  Matrix r = gaussian(40, 7, rng);
  CHECK(mean_center(r).colwise().mean().cwiseAbs().maxCoeff() < 1e-9);
  CHECK_THROWS_AS(mean_center(Matrix(0, 3)), DataError);
}

TEST_CASE("intersect_vocab") {
  Matrix z = Matrix::Ones(3, 2);
  auto a = embedding({"a", "b", "c"}, {1, 5, 2}, z);
  auto b = embedding({"b", "c", "d"}, {1, 9, 4}, z);
  auto map = intersect_vocab(a, b);
  CHECK(map.words == std::vector<std::string>{"c", "b"});  // joint 11 vs 6
  CHECK(map.rows_a == std::vector<WordIndex>{2, 1});
  CHECK(map.rows_b == std::vector<WordIndex>{1, 0});

  auto same = intersect_vocab(a, a);
  CHECK(same.size() == 3);

  auto tie1 = embedding({"y", "x"}, {2, 2}, Matrix::Ones(2, 2));
  CHECK(intersect_vocab(tie1, tie1).words == std::vector<std::string>{"x", "y"});

  auto d = embedding({"p", "q", "r"}, {1, 1, 1}, z);
  try {
    intersect_vocab(a, d);
    FAIL("expected error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()) == "no shared vocabulary");
  }
}

TEST_CASE("orthogonal_procrustes recovers identity and rotations") {
  std::mt19937_64 rng(21);
  Matrix a = gaussian(30, 5, rng);
  auto id = orthogonal_procrustes(a, a);
  CHECK((id.w - Matrix::Identity(5, 5)).norm() < 1e-6);
  CHECK(procrustes_residual(a, a, id.w) < 1e-6);

  Matrix r = random_orthogonal(5, rng);
  CHECK((r.transpose() * r - Matrix::Identity(5, 5)).norm() < 1e-10);
  Matrix b = a * r;
  auto w = orthogonal_procrustes(a, b);
  CHECK((w.w - r.transpose()).norm() < 1e-6);
  CHECK((w.w.transpose() * w.w - Matrix::Identity(5, 5)).norm() < 1e-6);
}

TEST_CASE("Procrustes residual beats random orthogonal probes") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix a = gaussian(6, 3, rng);
    Matrix b = gaussian(6, 3, rng);
    auto w = orthogonal_procrustes(a, b);
    const double best = procrustes_residual(a, b, w.w);
    for (int k = 0; k < 1000; ++k) CHECK(best <= procrustes_residual(a, b, random_orthogonal(3, rng)) + 1e-12);
  }
}

TEST_CASE("procrustes input validation") {
  Matrix a = Matrix::Ones(3, 2);
  Matrix b = Matrix::Ones(3, 3);
  CHECK_THROWS_AS(orthogonal_procrustes(a, b), DataError);
  Matrix c = a;
  c(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(orthogonal_procrustes(a, c), NumericError);
}

TEST_CASE("align: self, rotation, noise") {
  std::mt19937_64 rng(17);
  auto a = random_embedding(200, 10, rng);

  auto self = align(a, a);
  for (double cd : row_distances(self)) CHECK(cd < 1e-6);

  auto rotated = a;
  rotated.word_vectors = a.word_vectors * random_orthogonal(10, rng);
  auto rot = align(a, rotated);
  for (double cd : row_distances(rot)) CHECK(cd < 1e-6);

  auto noisy = a;
  std::uniform_real_distribution<double> u(-1e-3, 1e-3);
  for (Eigen::Index i = 0; i < noisy.word_vectors.size(); ++i) noisy.word_vectors.data()[i] += u(rng);
  auto np = align(a, noisy);
  double mean = 0.0;
  for (double cd : row_distances(np)) mean += cd;
  CHECK(mean / 200.0 < 0.01);
}

TEST_CASE("align: rotation invariance of per-word distances") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    auto a = random_embedding(80, 6, rng);
    auto b = random_embedding(80, 6, rng);
    auto br = b;
    br.word_vectors = b.word_vectors * random_orthogonal(6, rng);
    auto d1 = row_distances(align(a, b));
    auto d2 = row_distances(align(a, br));
    for (std::size_t i = 0; i < d1.size(); ++i) CHECK(std::fabs(d1[i] - d2[i]) < 1e-6);
  }
}

TEST_CASE("align: preprocessing postconditions") {
  std::mt19937_64 rng(6);
  auto a = random_embedding(50, 4, rng);
  auto b = random_embedding(60, 4, rng);
  auto p = align(a, b);
  CHECK(p.map.size() == 50);
  for (Eigen::Index i = 0; i < p.a.rows(); ++i) {
    CHECK(std::fabs(p.a.row(i).norm() - 1.0) < 1e-9);
    CHECK(std::fabs(p.b.row(i).norm() - 1.0) < 1e-9);
  }
  // centered intermediates
  Matrix rows_a(50, 4);
  for (std::size_t i = 0; i < 50; ++i) rows_a.row(static_cast<Eigen::Index>(i)) = a.word_vectors.row(p.map.rows_a[i]);
  CHECK(mean_center(length_normalize(rows_a)).colwise().mean().cwiseAbs().maxCoeff() < 1e-9);
  CHECK((p.w.w.transpose() * p.w.w - Matrix::Identity(4, 4)).norm() < 1e-6);
}

TEST_CASE("align: fit on the top rows still maps every row") {
  std::mt19937_64 rng(8);
  auto a = random_embedding(100, 5, rng);
  auto b = a;
  b.word_vectors = a.word_vectors * random_orthogonal(5, rng);
  AlignOptions opts;
  opts.fit_top_n = 20;
  auto p = align(a, b, opts);
  CHECK(p.b.rows() == 100);
  for (double cd : row_distances(p)) CHECK(cd < 1e-6);
}

TEST_CASE("matrix file round trip") {
  auto dir = test::temp_dir("align_io");
  std::mt19937_64 rng(1);
  Matrix w = random_orthogonal(4, rng);
  save_matrix(w, dir / "W.txt");
  CHECK(load_matrix(dir / "W.txt") == w);
}
