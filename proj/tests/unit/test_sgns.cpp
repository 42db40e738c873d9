#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lscd/change.hpp"
#include "lscd/error.hpp"
#include "lscd/sgns.hpp"
#include "test_util.hpp"

using namespace lscd;

namespace {

// Objective written directly from its definition, independent of the
// library's log-sigmoid helper.
double objective_oracle(const EmbeddingMatrix& m, const TrainingPair& p, const std::vector<WordIndex>& negs) {
  auto logsig = [](double x) { return std::log(1.0 / (1.0 + std::exp(-x))); };
  const auto w = m.word_vectors.row(p.word);
  double v = logsig(m.context_vectors.row(p.context).dot(w));
  for (auto n : negs) v += logsig(-m.context_vectors.row(n).dot(w));
  return v;
}

EmbeddingMatrix random_model(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::vector<std::string> words;
  for (std::size_t i = 0; i < n; ++i) words.push_back("w" + std::to_string(i));
  EmbeddingMatrix m;
  m.vocab = Vocabulary(words, std::vector<std::uint64_t>(n, 1), n, 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  m.word_vectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  m.context_vectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < m.word_vectors.size(); ++i) {
    m.word_vectors.data()[i] = u(rng);
    m.context_vectors.data()[i] = u(rng);
  }
  return m;
}

Corpus two_cluster_corpus(std::size_t sentences, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Corpus c;
  for (std::size_t s = 0; s < sentences; ++s) {
    const char prefix = (s % 2) ? 'a' : 'b';
    Sentence sen;
    const std::size_t len = 5 + rng() % 6;
    for (std::size_t i = 0; i < len; ++i) sen.tokens.push_back(std::string(1, prefix) + std::to_string(1 + rng() % 5));
    c.push_back(sen);
  }
  return c;
}

double cosine_sim(const Matrix& m, WordIndex i, WordIndex j) {
  return m.row(i).dot(m.row(j)) / (m.row(i).norm() * m.row(j).norm());
}

}  // namespace

TEST_CASE("sigmoid values and stability") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(2.0) == doctest::Approx(0.8807970779778823).epsilon(1e-15));
  CHECK(sigmoid(2.0) + sigmoid(-2.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sigmoid(40.0) > 1.0 - 1e-15);
  CHECK(sigmoid(40.0) <= 1.0);
  CHECK(std::isfinite(sigmoid(700.0)));
  CHECK(std::isfinite(sigmoid(-700.0)));
  CHECK(sigmoid(-700.0) >= 0.0);
  CHECK(sigmoid(-700.0) < 1e-300);
}

TEST_CASE("unigram sampler frequencies") {
  std::mt19937_64 rng(5);
  SUBCASE("counts 3:1 with exponent 1") {
    std::vector<std::uint64_t> counts{3, 1};
    UnigramSampler s(counts, 1.0);
    CHECK(s.probability(0) == doctest::Approx(0.75));
    std::size_t a = 0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) a += s.sample(rng) == 0;
    CHECK(std::fabs(static_cast<double>(a) / n - 0.75) < 0.01);
  }
  SUBCASE("uniform thirds") {
    std::vector<std::uint64_t> counts{1, 1, 1};
    UnigramSampler s(counts, 1.0);
    std::vector<int> hits(3, 0);
    const int n = 1000000;
    for (int i = 0; i < n; ++i) ++hits[s.sample(rng)];
    for (int h : hits) CHECK(std::fabs(h / static_cast<double>(n) - 1.0 / 3.0) < 0.01);
  }
  SUBCASE("exponent 0.75") {
    std::vector<std::uint64_t> counts{16, 1};
    UnigramSampler s(counts, 0.75);
    CHECK(s.probability(0) == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
  }
  SUBCASE("total variation against count^exponent over random vocabularies") {
    for (double expo : {1.0, 0.75}) {
      std::vector<std::uint64_t> counts;
      for (int i = 0; i < 50; ++i) counts.push_back(1 + rng() % 1000);
      UnigramSampler s(counts, expo);
      double total = 0.0, sum_p = 0.0;
      for (auto c : counts) total += std::pow(static_cast<double>(c), expo);
      for (std::size_t i = 0; i < counts.size(); ++i) sum_p += s.probability(static_cast<WordIndex>(i));
      CHECK(std::fabs(sum_p - 1.0) < 1e-9);
      std::vector<double> hits(counts.size(), 0.0);
      const int n = 1000000;
      std::vector<WordIndex> draws;
      for (int i = 0; i < n / 5; ++i) {
        negative_sample(s, 5, rng, draws);
        for (auto d : draws) hits[d] += 1.0;
      }
      double tv = 0.0;
      for (std::size_t i = 0; i < counts.size(); ++i)
        tv += std::fabs(hits[i] / n - std::pow(static_cast<double>(counts[i]), expo) / total);
      CHECK(0.5 * tv < 1e-2);
    }
  }
}

TEST_CASE("sgd_step with alpha 0 leaves the model unchanged") {
  std::mt19937_64 rng(1);
  auto m = random_model(5, 3, rng);
  const Matrix w = m.word_vectors, c = m.context_vectors;
  sgd_step({1, 2}, std::vector<WordIndex>{0, 3, 3}, m, 0.0);
  CHECK(m.word_vectors == w);
  CHECK(m.context_vectors == c);
}

TEST_CASE("sgd_step on zero vectors produces zero updates") {
  EmbeddingMatrix m;
  m.vocab = Vocabulary({"x", "y"}, {1, 1}, 2, 1);
  m.word_vectors = Matrix::Zero(2, 2);
  m.context_vectors = Matrix::Zero(2, 2);
  sgd_step({0, 1}, std::vector<WordIndex>{0}, m, 0.025);
  CHECK(m.word_vectors.isZero(0.0));
  CHECK(m.context_vectors.isZero(0.0));
}

TEST_CASE("sgd_step update equals alpha times the finite-difference gradient") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    auto m = random_model(5, 3, rng);
    TrainingPair p{static_cast<WordIndex>(rng() % 5), static_cast<WordIndex>(rng() % 5)};
    std::vector<WordIndex> negs;
    for (int k = 0; k < 3; ++k) negs.push_back(static_cast<WordIndex>(rng() % 5));

    // Central differences over every parameter of both matrices.
    const double h = 1e-5;
    std::vector<double> fd;
    for (Matrix* mat : {&m.word_vectors, &m.context_vectors}) {
      for (Eigen::Index i = 0; i < mat->size(); ++i) {
        const double orig = mat->data()[i];
        mat->data()[i] = orig + h;
        const double up = objective_oracle(m, p, negs);
        mat->data()[i] = orig - h;
        const double down = objective_oracle(m, p, negs);
        mat->data()[i] = orig;
        fd.push_back((up - down) / (2 * h));
      }
    }

    const double alpha = 1e-3;
    const Matrix w0 = m.word_vectors, c0 = m.context_vectors;
    sgd_step(p, negs, m, alpha);
    std::vector<double> analytic;
    for (Eigen::Index i = 0; i < w0.size(); ++i) analytic.push_back((m.word_vectors.data()[i] - w0.data()[i]) / alpha);
    for (Eigen::Index i = 0; i < c0.size(); ++i) analytic.push_back((m.context_vectors.data()[i] - c0.data()[i]) / alpha);

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) {
      num += (analytic[i] - fd[i]) * (analytic[i] - fd[i]);
      den += fd[i] * fd[i];
    }
    CHECK(std::sqrt(num) / std::max(std::sqrt(den), 1e-12) < 1e-4);
  }
}

TEST_CASE("non-finite scores raise TrainingDivergence") {
  std::mt19937_64 rng(3);
  auto m = random_model(3, 2, rng);
  m.word_vectors.row(0).setConstant(1e200);
  m.context_vectors.row(1).setConstant(1e200);
  CHECK_THROWS_AS(sgd_step({0, 1}, std::vector<WordIndex>{2}, m, 0.1), TrainingDivergence);
}

TEST_CASE("initialization ranges and epochs=0") {
  Corpus c = two_cluster_corpus(50, 4);
  Hyperparams hp;
  hp.dim = 8;
  hp.epochs = 0;
  hp.min_count = 1;
  hp.seed = 77;
  auto m = train_sgns(c, hp);
  auto init = initialize_model(build_vocabulary(c, 1), 8, 77);
  CHECK(m.word_vectors == init.word_vectors);
  CHECK(m.context_vectors.isZero(0.0));
  CHECK(m.word_vectors.maxCoeff() <= 0.5 / 8);
  CHECK(m.word_vectors.minCoeff() >= -0.5 / 8);
}

TEST_CASE("deterministic training is bit-reproducible") {
  Corpus c = two_cluster_corpus(300, 9);
  Hyperparams hp;
  hp.dim = 10;
  hp.epochs = 2;
  hp.min_count = 1;
  hp.window = 3;
  auto a = train_sgns(c, hp);
  auto b = train_sgns(c, hp);
  CHECK(a.word_vectors == b.word_vectors);
  CHECK(a.context_vectors == b.context_vectors);
  CHECK(a.word_vectors.allFinite());
  hp.seed = 2;
  auto other = train_sgns(c, hp);
  CHECK_FALSE(other.word_vectors == a.word_vectors);
}

TEST_CASE("two topic clusters separate; objective rises after one epoch") {
  Corpus c = two_cluster_corpus(2000, 10);
  Hyperparams hp;
  hp.dim = 10;
  hp.window = 5;
  hp.epochs = 20;
  hp.min_count = 1;
  hp.subsample = std::numeric_limits<double>::infinity();

  for (std::size_t threads : {std::size_t{1}, std::size_t{2}}) {
    hp.threads = threads;
    auto m = train_sgns(c, hp);
    double within = 0.0, cross = 0.0;
    int nw = 0, nc = 0;
    for (std::size_t i = 0; i < m.vocab.size(); ++i)
      for (std::size_t j = i + 1; j < m.vocab.size(); ++j) {
        const bool same = m.vocab.word(static_cast<WordIndex>(i))[0] == m.vocab.word(static_cast<WordIndex>(j))[0];
        const double s = cosine_sim(m.word_vectors, static_cast<WordIndex>(i), static_cast<WordIndex>(j));
        (same ? within : cross) += s;
        ++(same ? nw : nc);
      }
    CHECK(within / nw > cross / nc);
  }

  // Held-out pairs from fresh sentences of the same process.
  Corpus held = two_cluster_corpus(200, 11);
  hp.threads = 1;
  auto vocab = build_vocabulary(c, 1);
  std::mt19937_64 rng(12);
  UnigramSampler sampler(vocab.counts(), hp.ns_exponent);
  std::vector<std::pair<TrainingPair, std::vector<WordIndex>>> sample;
  for (const auto& s : held) {
    for (const auto& p : extract_pairs(s, vocab, {5, false}, hp.subsample, rng)) {
      std::vector<WordIndex> negs;
      negative_sample(sampler, 5, rng, negs);
      sample.emplace_back(p, negs);
    }
  }
  auto total = [&](const EmbeddingMatrix& m) {
    double v = 0.0;
    for (const auto& [p, n] : sample) v += objective_oracle(m, p, n);
    return v / static_cast<double>(sample.size());
  };
  hp.epochs = 0;
  const double before = total(train_sgns(c, hp));
  hp.epochs = 1;
  const double after = total(train_sgns(c, hp));
  CHECK(after > before);
}

TEST_CASE("embedding file round trip") {
  auto dir = test::temp_dir("sgns_io");
  EmbeddingMatrix m;
  m.vocab = Vocabulary({"gatto", "cane"}, {7, 5}, 20, 5);
  m.word_vectors.resize(2, 2);
  m.word_vectors << 0.1, -0.25, 1e-7, 3.0 / 7.0;
  save_embeddings(m, dir / "e.txt");
  const auto text = test::read_text(dir / "e.txt");
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  CHECK(text.rfind("2 2\ngatto ", 0) == 0);
  auto back = load_embeddings(dir / "e.txt");
  CHECK(back.vocab.words() == m.vocab.words());
  CHECK(back.vocab.counts() == m.vocab.counts());
  CHECK(back.vocab.total_tokens() == 20);
  CHECK((back.word_vectors - m.word_vectors).cwiseAbs().maxCoeff() <= 1e-6);

  // Without the sidecar, row order stands in for frequency.
  std::filesystem::remove(vocab_sidecar_path(dir / "e.txt"));
  auto bare = load_embeddings(dir / "e.txt");
  CHECK(bare.vocab.count(0) > bare.vocab.count(1));
}

TEST_CASE("malformed embedding files report the line") {
  auto dir = test::temp_dir("sgns_bad");
  test::write_text(dir / "arity.txt", "2 3\nuno 1 2 3\ndue 1 2\n");
  try {
    load_embeddings(dir / "arity.txt");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("due") != std::string::npos);
  }
  test::write_text(dir / "header.txt", "two 3\nuno 1 2 3\n");
  CHECK_THROWS_AS(load_embeddings(dir / "header.txt"), ParseError);
  test::write_text(dir / "short.txt", "3 1\nuno 1\n");
  CHECK_THROWS_AS(load_embeddings(dir / "short.txt"), ParseError);
  test::write_text(dir / "nan.txt", "1 1\nuno abc\n");
  CHECK_THROWS_AS(load_embeddings(dir / "nan.txt"), ParseError);
}

TEST_CASE("large model round trip preserves cosine distances") {
  auto dir = test::temp_dir("sgns_large");
  const std::size_t n = 50000, d = 300;
  std::mt19937_64 rng(8);
  std::vector<std::string> words;
  for (std::size_t i = 0; i < n; ++i) words.push_back("w" + std::to_string(i));
  EmbeddingMatrix m;
  m.vocab = Vocabulary(words, std::vector<std::uint64_t>(n, 1), n, 1);
  m.word_vectors.resize(n, d);
  std::normal_distribution<double> g(0.0, 0.1);
  for (Eigen::Index i = 0; i < m.word_vectors.size(); ++i) m.word_vectors.data()[i] = g(rng);
  save_embeddings(m, dir / "big.txt");
  auto back = load_embeddings(dir / "big.txt");
  REQUIRE(back.word_vectors.rows() == static_cast<Eigen::Index>(n));
  double worst = 0.0;
  for (std::size_t k = 0; k < 2000; ++k) {
    const auto i = static_cast<Eigen::Index>(rng() % n), j = static_cast<Eigen::Index>(rng() % n);
    auto cd = [&](const Matrix& x) {
      return cosine_distance(std::span<const double>(x.row(i).data(), d), std::span<const double>(x.row(j).data(), d));
    };
    worst = std::max(worst, std::fabs(cd(m.word_vectors) - cd(back.word_vectors)));
  }
  CHECK(worst < 1e-5);
  std::filesystem::remove_all(dir);
}
