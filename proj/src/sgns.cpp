#include "lscd/sgns.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "lscd/error.hpp"
#include "lscd/textio.hpp"

namespace lscd {

void Hyperparams::validate() const {
  if (dim < 1) throw DataError("dim must be >= 1");
  if (window < 1) throw DataError("window must be >= 1");
  if (negatives < 1) throw DataError("negatives must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DataError("alpha must be in (0, 1)");
  if (!(subsample > 0.0)) throw DataError("subsample threshold must be > 0");
  if (min_count < 1) throw DataError("min_count must be >= 1");
  if (!(ns_exponent >= 0.0 && ns_exponent <= 1.0)) throw DataError("ns_exponent must be in [0, 1]");
  if (threads < 1) throw DataError("threads must be >= 1");
}

UnigramSampler::UnigramSampler(std::span<const std::uint64_t> counts, double exponent) {
  if (counts.empty()) throw DataError("unigram sampler over empty vocabulary");
  probs_.resize(counts.size());
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    probs_[i] = std::pow(static_cast<double>(counts[i]), exponent);
    total += probs_[i];
  }
  cdf_.resize(counts.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    probs_[i] /= total;
    acc += probs_[i];
    cdf_[i] = acc;
  }
  cdf_.back() = 1.0;
}

namespace {

double dot(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) s += a[i] * b[i];
  return s;
}

// log s(x), stable for large |x|
double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

}  // namespace

double pair_objective(const TrainingPair& pair, std::span<const WordIndex> negatives,
                      const EmbeddingMatrix& model) {
  const std::size_t d = model.dim();
  const double* w = model.word_vectors.row(pair.word).data();
  double value = log_sigmoid(dot(model.context_vectors.row(pair.context).data(), w, d));
  for (WordIndex n : negatives)
    value += log_sigmoid(-dot(model.context_vectors.row(n).data(), w, d));
  return value;
}

void sgd_step(const TrainingPair& pair, std::span<const WordIndex> negatives,
              EmbeddingMatrix& model, double alpha, std::vector<double>& grad_w) {
  const std::size_t d = model.dim();
  double* w = model.word_vectors.row(pair.word).data();
  grad_w.assign(d, 0.0);

  // Coefficients first, all from pre-update values.
  double* c = model.context_vectors.row(pair.context).data();
  const double pos_dot = dot(c, w, d);
  if (!std::isfinite(pos_dot)) throw TrainingDivergence("non-finite score in sgd_step");
  const double g_pos = 1.0 - sigmoid(pos_dot);

  double g_neg[64];
  std::vector<double> g_neg_heap;
  double* g = g_neg;
  if (negatives.size() > 64) {
    g_neg_heap.resize(negatives.size());
    g = g_neg_heap.data();
  }
  for (std::size_t i = 0; i < negatives.size(); ++i) {
    const double s = dot(model.context_vectors.row(negatives[i]).data(), w, d);
    if (!std::isfinite(s)) throw TrainingDivergence("non-finite score in sgd_step");
    g[i] = -sigmoid(s);
  }

  for (std::size_t j = 0; j < d; ++j) grad_w[j] = g_pos * c[j];
  for (std::size_t i = 0; i < negatives.size(); ++i) {
    const double* ci = model.context_vectors.row(negatives[i]).data();
    for (std::size_t j = 0; j < d; ++j) grad_w[j] += g[i] * ci[j];
  }

  // Context updates read w before it moves.
  const double a_pos = alpha * g_pos;
  for (std::size_t j = 0; j < d; ++j) c[j] += a_pos * w[j];
  for (std::size_t i = 0; i < negatives.size(); ++i) {
    double* ci = model.context_vectors.row(negatives[i]).data();
    const double a = alpha * g[i];
    for (std::size_t j = 0; j < d; ++j) ci[j] += a * w[j];
  }
  double check = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    w[j] += alpha * grad_w[j];
    check += w[j];
  }
  if (!std::isfinite(check)) throw TrainingDivergence("non-finite word vector after sgd_step");
}

void sgd_step(const TrainingPair& pair, std::span<const WordIndex> negatives,
              EmbeddingMatrix& model, double alpha) {
  std::vector<double> scratch;
  sgd_step(pair, negatives, model, alpha, scratch);
}

EmbeddingMatrix initialize_model(Vocabulary vocab, std::size_t dim, std::uint64_t seed) {
  EmbeddingMatrix model;
  const auto n = static_cast<Eigen::Index>(vocab.size());
  const auto d = static_cast<Eigen::Index>(dim);
  model.vocab = std::move(vocab);
  model.word_vectors.resize(n, d);
  model.context_vectors = Matrix::Zero(n, d);
  std::mt19937_64 rng(seed);
  const double scale = 1.0 / static_cast<double>(dim);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) model.word_vectors(i, j) = (uniform01(rng) - 0.5) * scale;
  return model;
}

namespace {

struct Schedule {
  double alpha;
  double total_work;  // epochs * in-vocabulary tokens

  double at(double processed) const {
    const double floor = alpha * 1e-4;
    return std::max(floor, alpha * (1.0 - processed / (total_work + 1.0)));
  }
};

// Trains on sentences [begin, end) of `encoded` for one epoch.
void train_shard(EmbeddingMatrix& model, const std::vector<std::vector<WordIndex>>& encoded,
                 std::size_t begin, std::size_t end, const std::vector<double>& keep,
                 const UnigramSampler& sampler, const Hyperparams& hp, const Schedule& schedule,
                 std::atomic<std::uint64_t>& processed, std::atomic<std::uint64_t>& pair_count,
                 std::mt19937_64& rng) {
  const WindowOptions opts{hp.window, hp.dynamic_window};
  std::vector<TrainingPair> pairs;
  std::vector<WordIndex> scratch;
  std::vector<WordIndex> negatives;
  std::vector<double> grad;
  std::uint64_t local_pairs = 0;
  for (std::size_t s = begin; s < end; ++s) {
    const auto& ids = encoded[s];
    const double alpha =
        schedule.at(static_cast<double>(processed.load(std::memory_order_relaxed)));
    pairs.clear();
    extract_pairs_encoded(std::span<const WordIndex>(ids), std::span<const double>(keep), opts,
                          rng, pairs, scratch);
    for (const auto& p : pairs) {
      negative_sample(sampler, hp.negatives, rng, negatives);
      sgd_step(p, negatives, model, alpha, grad);
    }
    local_pairs += pairs.size();
    processed.fetch_add(ids.size(), std::memory_order_relaxed);
  }
  pair_count.fetch_add(local_pairs, std::memory_order_relaxed);
}

}  // namespace

EmbeddingMatrix train_sgns(std::span<const Sentence> corpus, const Hyperparams& hp,
                           TrainingStats* stats) {
  hp.validate();
  return train_sgns(build_vocabulary(corpus, hp.min_count), corpus, hp, stats);
}

EmbeddingMatrix train_sgns(Vocabulary vocab, std::span<const Sentence> corpus,
                           const Hyperparams& hp, TrainingStats* stats) {
  hp.validate();
  if (vocab.empty()) throw DataError("empty vocabulary");

  std::vector<std::vector<WordIndex>> encoded;
  encoded.reserve(corpus.size());
  std::uint64_t train_tokens = 0;
  for (const auto& s : corpus) {
    encoded.push_back(encode(s, vocab));
    train_tokens += encoded.back().size();
  }
  const auto keep = keep_probabilities(vocab, hp.subsample);
  const UnigramSampler sampler(vocab.counts(), hp.ns_exponent);

  // The init stream is separate from the training stream so epochs=0 gives
  // exactly the initialization for the seed.
  EmbeddingMatrix model = initialize_model(std::move(vocab), hp.dim, hp.seed);
  const Schedule schedule{hp.alpha, static_cast<double>(hp.epochs) * static_cast<double>(train_tokens)};

  std::atomic<std::uint64_t> processed{0};
  std::atomic<std::uint64_t> pair_count{0};
  const std::size_t threads = std::min<std::size_t>(hp.threads, std::max<std::size_t>(1, encoded.size()));

  if (threads == 1) {
    std::mt19937_64 rng(hp.seed ^ 0x9E3779B97F4A7C15ULL);
    for (std::size_t e = 0; e < hp.epochs; ++e)
      train_shard(model, encoded, 0, encoded.size(), keep, sampler, hp, schedule, processed,
                  pair_count, rng);
  } else {
    // Hogwild: workers share the parameter matrices without locking.
    std::vector<std::mt19937_64> rngs;
    for (std::size_t t = 0; t < threads; ++t)
      rngs.emplace_back(hp.seed ^ (0x9E3779B97F4A7C15ULL * (t + 1)));
    for (std::size_t e = 0; e < hp.epochs; ++e) {
      std::vector<std::thread> workers;
      std::vector<std::exception_ptr> errors(threads);
      for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t begin = encoded.size() * t / threads;
        const std::size_t end = encoded.size() * (t + 1) / threads;
        workers.emplace_back([&, t, begin, end] {
          try {
            train_shard(model, encoded, begin, end, keep, sampler, hp, schedule, processed,
                        pair_count, rngs[t]);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      }
      for (auto& w : workers) w.join();
      for (auto& err : errors)
        if (err) std::rethrow_exception(err);
    }
  }

  if (stats) {
    stats->pairs = pair_count.load();
    stats->tokens = processed.load();
    stats->final_alpha = schedule.at(static_cast<double>(processed.load()));
  }
  return model;
}

std::filesystem::path vocab_sidecar_path(const std::filesystem::path& embeddings) {
  auto p = embeddings;
  p += ".vocab";
  return p;
}

void save_embeddings(const EmbeddingMatrix& model, const std::filesystem::path& path) {
  const std::size_t n = model.vocab.size();
  const std::size_t d = model.dim();
  if (static_cast<std::size_t>(model.word_vectors.rows()) != n)
    throw DataError("save_embeddings: row count does not match vocabulary");
  std::string out;
  out.reserve(n * (d * 12 + 16));
  out += std::to_string(n) + " " + std::to_string(d) + "\n";
  for (std::size_t i = 0; i < n; ++i) {
    out += model.vocab.word(static_cast<WordIndex>(i));
    for (std::size_t j = 0; j < d; ++j) {
      out += ' ';
      out += textio::format_double(model.word_vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    out += '\n';
  }
  textio::write_file(path, out);

  std::string side = std::to_string(model.vocab.total_tokens()) + " " +
                     std::to_string(model.vocab.min_count()) + "\n";
  for (std::size_t i = 0; i < n; ++i)
    side += model.vocab.word(static_cast<WordIndex>(i)) + " " +
            std::to_string(model.vocab.count(static_cast<WordIndex>(i))) + "\n";
  textio::write_file(vocab_sidecar_path(path), side);
}

namespace {

std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  for (auto f : textio::split(line, ' '))
    if (!f.empty()) out.push_back(f);
  return out;
}

}  // namespace

EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  const std::string name = path.string();
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t row = 0;
  std::vector<std::string> words;
  Matrix vectors;
  textio::for_each_line(path, [&](std::string_view line, std::size_t number) {
    auto f = fields(line);
    if (number == 1) {
      if (f.size() != 2) throw ParseError(name, number, "header must be '<rows> <dim>'");
      auto rows = textio::parse_int(f[0]);
      auto dims = textio::parse_int(f[1]);
      if (!rows || !dims || *rows < 0 || *dims < 1)
        throw ParseError(name, number, "malformed header '" + std::string(line) + "'");
      n = static_cast<std::size_t>(*rows);
      d = static_cast<std::size_t>(*dims);
      vectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
      words.reserve(n);
      return;
    }
    if (f.empty()) return;
    if (row >= n) throw ParseError(name, number, "more rows than the header declares");
    if (f.size() != d + 1)
      throw ParseError(name, number,
                       "row '" + std::string(f[0]) + "' has " + std::to_string(f.size() - 1) +
                           " values, expected " + std::to_string(d));
    words.emplace_back(f[0]);
    for (std::size_t j = 0; j < d; ++j) {
      auto v = textio::parse_double(f[j + 1]);
      if (!v || !std::isfinite(*v))
        throw ParseError(name, number, "bad value '" + std::string(f[j + 1]) + "'");
      vectors(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) = *v;
    }
    ++row;
  });
  if (d == 0) throw ParseError(name, 1, "missing header");
  if (row != n)
    throw ParseError(name, row + 1, "header declares " + std::to_string(n) + " rows, found " +
                                        std::to_string(row));

  std::vector<std::uint64_t> counts(n);
  std::uint64_t total = 0;
  std::uint64_t min_count = 1;
  const auto side = vocab_sidecar_path(path);
  if (std::filesystem::exists(side)) {
    const std::string sname = side.string();
    std::size_t i = 0;
    textio::for_each_line(side, [&](std::string_view line, std::size_t number) {
      auto f = fields(line);
      if (f.empty()) return;
      if (f.size() != 2) throw ParseError(sname, number, "expected two fields");
      if (number == 1) {
        auto t = textio::parse_int(f[0]);
        auto m = textio::parse_int(f[1]);
        if (!t || !m || *t < 0 || *m < 1) throw ParseError(sname, number, "malformed header");
        total = static_cast<std::uint64_t>(*t);
        min_count = static_cast<std::uint64_t>(*m);
        return;
      }
      if (i >= n || f[0] != words[i])
        throw ParseError(sname, number, "sidecar does not match embedding rows");
      auto c = textio::parse_int(f[1]);
      if (!c || *c < 0) throw ParseError(sname, number, "bad count");
      counts[i++] = static_cast<std::uint64_t>(*c);
    });
    if (i != n) throw ParseError(sname, i + 2, "sidecar has fewer rows than embeddings");
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      counts[i] = n - i;
      total += counts[i];
    }
  }

  EmbeddingMatrix model;
  try {
    model.vocab = Vocabulary(std::move(words), std::move(counts), total, min_count);
  } catch (const DataError& e) {
    throw DataError(name + ": " + e.what());
  }
  model.word_vectors = std::move(vectors);
  return model;
}

}  // namespace lscd
