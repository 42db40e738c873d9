#include "lscd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "lscd/error.hpp"
#include "lscd/textio.hpp"

namespace lscd {

SynthSpec SynthSpec::defaults() {
  SynthSpec spec;
  for (int i = 0; i < 10; ++i) {
    char name[16];
    std::snprintf(name, sizeof(name), "pw%02d", i);
    const bool changed = i < 5;
    spec.targets.push_back({name, changed, changed ? 1.0 : 0.0});
  }
  return spec;
}

namespace {

std::string vocab_word(std::size_t i) {
  char name[24];
  std::snprintf(name, sizeof(name), "w%04zu", i);
  return name;
}

}  // namespace

void SynthSpec::validate() const {
  if (clusters < 1) throw DataError("synth: need at least one cluster");
  if (vocab_size < clusters) throw DataError("synth: vocab_size must be >= clusters");
  if (min_length < 2 || max_length < min_length)
    throw DataError("synth: sentence lengths must satisfy 2 <= min_length <= max_length");
  if (!(zipf_exponent >= 0.0)) throw DataError("synth: zipf_exponent must be >= 0");
  if (!(ring_width >= 0.0)) throw DataError("synth: ring_width must be >= 0");
  if (ring_bins < 1) throw DataError("synth: ring_bins must be >= 1");
  if (!(background >= 0.0 && background < 1.0)) throw DataError("synth: background must lie in [0, 1)");
  if (targets.size() * target_occurrences > sentences)
    throw DataError("synth: target sentences exceed the sentence budget");
  std::unordered_set<std::string> names;
  for (const auto& t : targets) {
    if (t.word.empty() || t.word.find_first_of(" \t\n") != std::string::npos)
      throw DataError("synth: invalid target name '" + t.word + "'");
    if (t.word.size() == 5 && t.word[0] == 'w' &&
        std::all_of(t.word.begin() + 1, t.word.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw DataError("synth: target '" + t.word + "' collides with vocabulary words");
    if (!names.insert(t.word).second) throw DataError("synth: duplicate target '" + t.word + "'");
    if (!(t.mix >= 0.0 && t.mix <= 1.0)) throw DataError("synth: mix must lie in [0, 1] for '" + t.word + "'");
    if (t.changed && t.mix == 0.0)
      throw DataError("synth: target '" + t.word +
                      "' is marked changed but mix = 0 gives identical context distributions");
    if (!t.changed && t.mix != 0.0)
      throw DataError("synth: target '" + t.word + "' is unchanged but has mix > 0");
    if (t.changed && clusters < 2) throw DataError("synth: changed targets need >= 2 clusters");
  }
}

namespace {

constexpr double kTwoPi = 6.283185307179586;

// Per cluster and per discretized ring center, a CDF over the cluster's words.
struct ClusterSampler {
  std::vector<std::size_t> members;
  std::vector<std::vector<double>> cdf;  // [center bin][member]

  template <class Rng>
  std::size_t draw(std::size_t bin, Rng& rng) const {
    const auto& c = cdf[bin];
    auto it = std::upper_bound(c.begin(), c.end(), uniform01(rng));
    if (it == c.end()) --it;
    return members[static_cast<std::size_t>(it - c.begin())];
  }
};

// Golden-ratio spacing keeps ring position independent of frequency rank.
double ring_position(std::size_t rank) {
  const double x = static_cast<double>(rank) * 0.6180339887498949;
  return x - std::floor(x);
}

double ring_distance(double a, double b) {
  const double d = std::fabs(a - b);
  return std::min(d, 1.0 - d);
}

std::vector<ClusterSampler> build_clusters(const SynthSpec& spec) {
  std::vector<ClusterSampler> out(spec.clusters);
  for (std::size_t i = 0; i < spec.vocab_size; ++i) out[i % spec.clusters].members.push_back(i);
  for (auto& c : out) {
    c.cdf.assign(spec.ring_bins, {});
    for (std::size_t b = 0; b < spec.ring_bins; ++b) {
      const double center = (static_cast<double>(b) + 0.5) / static_cast<double>(spec.ring_bins);
      double acc = 0.0;
      for (std::size_t r = 0; r < c.members.size(); ++r) {
        double w = 1.0 / std::pow(static_cast<double>(r + 1), spec.zipf_exponent);
        if (spec.ring_width > 0.0) {
          const double z = ring_distance(ring_position(r), center) / spec.ring_width;
          w *= std::exp(-0.5 * z * z) + 1e-12;
        }
        acc += w;
        c.cdf[b].push_back(acc);
      }
      for (auto& x : c.cdf[b]) x /= acc;
      c.cdf[b].back() = 1.0;
    }
  }
  return out;
}

// Vocabulary-wide distribution for topic-independent background tokens.
std::vector<double> background_cdf(const SynthSpec& spec) {
  std::vector<double> cdf;
  cdf.reserve(spec.vocab_size);
  double acc = 0.0;
  for (std::size_t i = 0; i < spec.vocab_size; ++i) {
    acc += 1.0 / std::pow(static_cast<double>(i / spec.clusters + 1), spec.zipf_exponent);
    cdf.push_back(acc);
  }
  for (auto& x : cdf) x /= acc;
  cdf.back() = 1.0;
  return cdf;
}

template <class Rng>
std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
}

std::size_t home_cluster(std::size_t t, std::size_t clusters) { return t % clusters; }

std::size_t shifted_cluster(std::size_t t, std::size_t clusters) {
  const std::size_t x = home_cluster(t, clusters);
  return (x + 1 + (t / clusters) % (clusters - 1)) % clusters;
}

// Targets live on the ring like ordinary words: sentence centers are drawn
// from the kernel around the target's own position.
template <class Rng>
std::size_t target_bin(std::size_t t, const SynthSpec& spec, Rng& rng) {
  const double x = static_cast<double>(t + 1) * 1.4142135623730951;
  double pos = x - std::floor(x);
  if (spec.ring_width > 0.0) {
    // Box-Muller on the generator's own uniform draws keeps output portable.
    const double u1 = std::max(uniform01(rng), 1e-300), u2 = uniform01(rng);
    pos += spec.ring_width * std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    pos -= std::floor(pos);
  }
  return std::min(spec.ring_bins - 1, static_cast<std::size_t>(pos * static_cast<double>(spec.ring_bins)));
}

Corpus generate_one(const SynthSpec& spec, const std::vector<ClusterSampler>& clusters,
                    const std::vector<double>& background, const std::vector<std::string>& words, bool second,
                    std::mt19937_64& rng) {
  // -1 = plain sentence, otherwise index of the planted target
  std::vector<long> plan(spec.sentences, -1);
  std::size_t k = 0;
  for (std::size_t t = 0; t < spec.targets.size(); ++t)
    for (std::size_t o = 0; o < spec.target_occurrences; ++o) plan[k++] = static_cast<long>(t);
  for (std::size_t i = plan.size(); i > 1; --i) std::swap(plan[i - 1], plan[uniform_index(rng, i)]);

  Corpus corpus;
  corpus.reserve(spec.sentences);
  const std::size_t span = spec.max_length - spec.min_length + 1;
  for (long entry : plan) {
    std::size_t cluster, bin;
    if (entry < 0) {
      cluster = uniform_index(rng, spec.clusters);
      bin = uniform_index(rng, spec.ring_bins);
    } else {
      const auto t = static_cast<std::size_t>(entry);
      const auto& target = spec.targets[t];
      cluster = home_cluster(t, spec.clusters);
      bin = target_bin(t, spec, rng);
      if (second && target.changed && uniform01(rng) < target.mix)
        cluster = shifted_cluster(t, spec.clusters);
    }
    const std::size_t len = spec.min_length + uniform_index(rng, span);
    Sentence s;
    s.tokens.reserve(len);
    for (std::size_t i = 0; i < len; ++i) {
      if (spec.background > 0.0 && uniform01(rng) < spec.background) {
        auto it = std::upper_bound(background.begin(), background.end(), uniform01(rng));
        if (it == background.end()) --it;
        s.tokens.push_back(words[static_cast<std::size_t>(it - background.begin())]);
      } else {
        s.tokens.push_back(words[clusters[cluster].draw(bin, rng)]);
      }
    }
    if (entry >= 0) s.tokens[uniform_index(rng, len)] = spec.targets[static_cast<std::size_t>(entry)].word;
    corpus.push_back(std::move(s));
  }
  return corpus;
}

std::unordered_map<std::string, std::uint64_t> context_counts(const Corpus& corpus, const std::string& target) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& s : corpus) {
    bool has = std::find(s.tokens.begin(), s.tokens.end(), target) != s.tokens.end();
    if (!has) continue;
    for (const auto& tok : s.tokens)
      if (tok != target) ++counts[tok];
  }
  return counts;
}

// Homogeneity test of the target's context-word distribution in C1 vs C2.
// Words with small expected counts are pooled into one bin.
ChiSquareCheck chi_square(const Corpus& c1, const Corpus& c2, const std::string& target) {
  auto a = context_counts(c1, target);
  auto b = context_counts(c2, target);
  std::unordered_set<std::string> keys;
  double na = 0.0, nb = 0.0;
  for (const auto& [w, c] : a) {
    keys.insert(w);
    na += static_cast<double>(c);
  }
  for (const auto& [w, c] : b) {
    keys.insert(w);
    nb += static_cast<double>(c);
  }
  ChiSquareCheck check;
  check.word = target;
  if (na == 0.0 || nb == 0.0) {
    check.ok = false;
    return check;
  }
  std::vector<std::pair<double, double>> bins;
  double pool_a = 0.0, pool_b = 0.0;
  const double total = na + nb;
  for (const auto& w : keys) {
    const double ca = a.count(w) ? static_cast<double>(a[w]) : 0.0;
    const double cb = b.count(w) ? static_cast<double>(b[w]) : 0.0;
    const double row = ca + cb;
    if (row * std::min(na, nb) / total < 5.0) {
      pool_a += ca;
      pool_b += cb;
    } else {
      bins.emplace_back(ca, cb);
    }
  }
  if (pool_a + pool_b > 0.0) bins.emplace_back(pool_a, pool_b);
  double stat = 0.0;
  for (const auto& [ca, cb] : bins) {
    const double row = ca + cb;
    const double ea = row * na / total, eb = row * nb / total;
    stat += (ca - ea) * (ca - ea) / ea + (cb - eb) * (cb - eb) / eb;
  }
  check.statistic = stat;
  check.dof = bins.size() > 1 ? bins.size() - 1 : 1;
  const double dof = static_cast<double>(check.dof);
  check.ok = (stat - dof) / std::sqrt(2.0 * dof) < 6.0;
  return check;
}

}  // namespace

SynthCorpora generate(const SynthSpec& spec, std::uint64_t seed) {
  spec.validate();
  const auto clusters = build_clusters(spec);
  const auto background = background_cdf(spec);
  std::vector<std::string> words;
  words.reserve(spec.vocab_size);
  for (std::size_t i = 0; i < spec.vocab_size; ++i) words.push_back(vocab_word(i));

  SynthCorpora out;
  std::mt19937_64 rng1(seed * 2 + 1);
  std::mt19937_64 rng2(seed * 2 + 2);
  out.c1 = generate_one(spec, clusters, background, words, false, rng1);
  out.c2 = generate_one(spec, clusters, background, words, true, rng2);
  for (const auto& t : spec.targets) {
    out.targets.push_back(t.word);
    out.gold.emplace_back(t.word, t.changed ? 1 : 0);
    if (!t.changed) out.checks.push_back(chi_square(out.c1, out.c2, t.word));
  }
  return out;
}

SynthFiles write_synth(const SynthCorpora& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  SynthFiles files{dir / "c1.txt", dir / "c2.txt", dir / "targets.txt", dir / "gold.tsv"};
  save_corpus(files.corpus1, data.c1);
  save_corpus(files.corpus2, data.c2);
  textio::write_word_list(files.targets, data.targets);
  write_labels(files.gold, data.gold);
  return files;
}

}  // namespace lscd
