#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "lscd/error.hpp"
#include "lscd/synth.hpp"
#include "test_util.hpp"

using namespace lscd;

namespace {

SynthSpec small_spec() {
  SynthSpec s = SynthSpec::defaults();
  s.vocab_size = 400;
  s.sentences = 8000;
  s.target_occurrences = 200;
  return s;
}

std::size_t cluster_of(const std::string& tok, std::size_t clusters) {
  return static_cast<std::size_t>(std::stoul(tok.substr(1))) % clusters;
}

// Share of the plain words sharing a sentence with `target`, per cluster.
std::vector<double> context_clusters(const Corpus& c, const std::string& target, std::size_t clusters,
                                     std::size_t* occurrences) {
  std::vector<double> share(clusters, 0.0);
  double total = 0.0;
  *occurrences = 0;
  for (const auto& s : c) {
    if (std::find(s.tokens.begin(), s.tokens.end(), target) == s.tokens.end()) continue;
    ++*occurrences;
    for (const auto& t : s.tokens)
      if (t != target) {
        share[cluster_of(t, clusters)] += 1.0;
        total += 1.0;
      }
  }
  for (auto& x : share) x /= total;
  return share;
}

std::size_t dominant(const std::vector<double>& share) {
  return static_cast<std::size_t>(std::max_element(share.begin(), share.end()) - share.begin());
}

std::size_t nonzero(const std::vector<double>& share) {
  return static_cast<std::size_t>(std::count_if(share.begin(), share.end(), [](double x) { return x > 0.0; }));
}

}  // namespace

TEST_CASE("default spec shape") {
  auto s = SynthSpec::defaults();
  CHECK(s.vocab_size == 2000);
  CHECK(s.sentences == 50000);
  CHECK(s.clusters == 4);
  REQUIRE(s.targets.size() == 10);
  CHECK(std::count_if(s.targets.begin(), s.targets.end(), [](const auto& t) { return t.changed; }) == 5);
  for (const auto& t : s.targets) CHECK(t.mix == (t.changed ? 1.0 : 0.0));
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("no changed targets gives all-zero gold") {
  auto s = small_spec();
  for (auto& t : s.targets) {
    t.changed = false;
    t.mix = 0.0;
  }
  auto d = generate(s, 3);
  REQUIRE(d.gold.size() == 10);
  for (const auto& [w, l] : d.gold) CHECK(l == 0);
  CHECK(d.checks.size() == 10);
}

TEST_CASE("inconsistent specs are rejected") {
  auto s = small_spec();
  s.targets[0].mix = 0.0;
  CHECK_THROWS_AS(s.validate(), DataError);
  CHECK_THROWS_AS(generate(s, 1), DataError);

  auto u = small_spec();
  u.targets[7].mix = 0.5;
  CHECK_THROWS_AS(u.validate(), DataError);

  auto collide = small_spec();
  collide.targets[0].word = "w0001";
  CHECK_THROWS_AS(collide.validate(), DataError);

  auto dup = small_spec();
  dup.targets[1].word = dup.targets[0].word;
  CHECK_THROWS_AS(dup.validate(), DataError);

  auto budget = small_spec();
  budget.target_occurrences = 1000;
  CHECK_THROWS_AS(budget.validate(), DataError);

  auto one = small_spec();
  one.clusters = 1;
  CHECK_THROWS_AS(one.validate(), DataError);

  auto bg = small_spec();
  bg.background = 1.0;
  CHECK_THROWS_AS(bg.validate(), DataError);

  auto lengths = small_spec();
  lengths.min_length = 1;
  CHECK_THROWS_AS(lengths.validate(), DataError);
}

TEST_CASE("generation is reproducible under a seed") {
  auto s = small_spec();
  auto a = generate(s, 11);
  auto b = generate(s, 11);
  auto c = generate(s, 12);
  REQUIRE(a.c1.size() == b.c1.size());
  bool same = true;
  for (std::size_t i = 0; i < a.c1.size(); ++i) same = same && a.c1[i].tokens == b.c1[i].tokens && a.c2[i].tokens == b.c2[i].tokens;
  CHECK(same);
  bool differs = false;
  for (std::size_t i = 0; i < a.c1.size(); ++i) differs = differs || a.c1[i].tokens != c.c1[i].tokens;
  CHECK(differs);
  CHECK(a.gold == b.gold);
}

TEST_CASE("changed targets move cluster and unchanged ones stay") {
  auto s = small_spec();
  auto d = generate(s, 5);
  CHECK(d.c1.size() == s.sentences);
  CHECK(d.c2.size() == s.sentences);
  for (const auto& t : s.targets) {
    std::size_t n1 = 0, n2 = 0;
    auto k1 = context_clusters(d.c1, t.word, s.clusters, &n1);
    auto k2 = context_clusters(d.c2, t.word, s.clusters, &n2);
    CHECK(n1 == s.target_occurrences);
    CHECK(n2 == s.target_occurrences);
    // topic tokens dominate; background tokens spread over every cluster
    CHECK(k1[dominant(k1)] > 0.6);
    CHECK(k2[dominant(k2)] > 0.6);
    if (t.changed)
      CHECK(dominant(k1) != dominant(k2));
    else
      CHECK(dominant(k1) == dominant(k2));
  }
  for (const auto& s2 : d.c1) {
    CHECK(s2.tokens.size() >= s.min_length);
    CHECK(s2.tokens.size() <= s.max_length);
  }
}

TEST_CASE("without background tokens contexts come from a single cluster") {
  auto s = small_spec();
  s.background = 0.0;
  auto d = generate(s, 5);
  for (const auto& t : s.targets) {
    std::size_t n = 0;
    auto k1 = context_clusters(d.c1, t.word, s.clusters, &n);
    auto k2 = context_clusters(d.c2, t.word, s.clusters, &n);
    CHECK(nonzero(k1) == 1);
    CHECK(nonzero(k2) == 1);
    CHECK((dominant(k1) == dominant(k2)) == !t.changed);
  }
}

TEST_CASE("partial mixing splits C2 contexts between two clusters") {
  auto s = small_spec();
  s.background = 0.0;
  s.targets[0].mix = 0.5;
  auto d = generate(s, 2);
  std::size_t n = 0;
  CHECK(nonzero(context_clusters(d.c1, s.targets[0].word, s.clusters, &n)) == 1);
  auto k2 = context_clusters(d.c2, s.targets[0].word, s.clusters, &n);
  CHECK(nonzero(k2) == 2);
  for (double x : k2)
    if (x > 0.0) CHECK(x == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("ring structure gives words distinct neighbourhoods") {
  // two words of one cluster far apart on the ring rarely share a sentence
  auto s = small_spec();
  s.background = 0.0;
  auto d = generate(s, 9);
  // ranks 0 and 1 of cluster 0 sit 0.38 apart on the ring (golden-ratio spacing)
  REQUIRE(s.clusters == 4);
  const std::string a = "w0000", b = "w0004";
  std::size_t with_a = 0, both = 0;
  for (const auto& sen : d.c1) {
    const bool ha = std::find(sen.tokens.begin(), sen.tokens.end(), a) != sen.tokens.end();
    const bool hb = std::find(sen.tokens.begin(), sen.tokens.end(), b) != sen.tokens.end();
    with_a += ha;
    both += ha && hb;
  }
  REQUIRE(with_a > 100);
  CHECK(static_cast<double>(both) / static_cast<double>(with_a) < 0.01);
}

TEST_CASE("chi-square sanity check passes for unchanged targets") {
  auto s = small_spec();
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto d = generate(s, seed);
    REQUIRE(d.checks.size() == 5);
    for (const auto& c : d.checks) {
      CHECK(c.ok);
      CHECK(c.dof >= 1);
    }
  }
}

TEST_CASE("write_synth emits the pipeline input files") {
  auto s = small_spec();
  auto d = generate(s, 4);
  auto dir = test::temp_dir("synth");
  auto files = write_synth(d, dir);
  auto c1 = load_corpus(files.corpus1);
  CHECK(c1.size() == d.c1.size());
  CHECK(c1[17].tokens == d.c1[17].tokens);
  CHECK(read_labels(files.gold) == d.gold);
  CHECK(test::read_text(files.targets).rfind("pw00\npw01\n", 0) == 0);
}
