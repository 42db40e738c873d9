#include "lscd/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "lscd/error.hpp"

namespace lscd {

BaselineKind parse_baseline(const std::string& s) {
  if (s == "freq") return BaselineKind::Frequency;
  if (s == "colloc") return BaselineKind::Collocation;
  if (s == "majority") return BaselineKind::Majority;
  throw DataError("unknown baseline '" + s + "'");
}

const char* to_string(BaselineKind k) {
  switch (k) {
    case BaselineKind::Frequency: return "freq";
    case BaselineKind::Collocation: return "colloc";
    case BaselineKind::Majority: return "majority";
  }
  return "unknown";
}

double frequency_score(std::uint64_t c1, std::uint64_t n1, std::uint64_t c2, std::uint64_t n2,
                       bool raw_counts) {
  if (raw_counts) return std::fabs(static_cast<double>(c1) - static_cast<double>(c2));
  if (n1 == 0 || n2 == 0) throw DataError("frequency baseline: corpus size must be > 0");
  const double f1 = static_cast<double>(c1) / static_cast<double>(n1);
  const double f2 = static_cast<double>(c2) / static_cast<double>(n2);
  return std::fabs(f1 - f2) * 1e6;
}

std::vector<WordScore> frequency_baseline(const CorpusStats& stats,
                                          const std::vector<std::string>& targets, bool raw_counts) {
  std::vector<WordScore> out;
  out.reserve(targets.size());
  for (const auto& t : targets)
    out.emplace_back(t, frequency_score(stats.count1(t), stats.size1, stats.count2(t), stats.size2,
                                        raw_counts));
  return out;
}

std::vector<WordScore> frequency_scores_all(const CorpusStats& stats, bool raw_counts) {
  std::unordered_set<std::string> words;
  for (const auto& [w, c] : stats.counts1) words.insert(w);
  for (const auto& [w, c] : stats.counts2) words.insert(w);
  std::vector<WordScore> out;
  out.reserve(words.size());
  for (const auto& w : words)
    out.emplace_back(w, frequency_score(stats.count1(w), stats.size1, stats.count2(w), stats.size2,
                                        raw_counts));
  sort_ranking(out);
  return out;
}

double cosine_distance(const CountVector& a, const CountVector& b) {
  if (a.empty() || b.empty()) throw NumericError("undefined distance for zero vector");
  const CountVector& small = a.size() <= b.size() ? a : b;
  const CountVector& large = a.size() <= b.size() ? b : a;
  double dot = 0.0;
  for (const auto& [k, v] : small)
    if (auto it = large.find(k); it != large.end())
      dot += static_cast<double>(v) * static_cast<double>(it->second);
  auto sq = [](const CountVector& m) {
    double s = 0.0;
    for (const auto& [k, v] : m) s += static_cast<double>(v) * static_cast<double>(v);
    return s;
  };
  const double cd = 1.0 - dot / (std::sqrt(sq(a)) * std::sqrt(sq(b)));
  return std::clamp(cd, 0.0, 2.0);
}

namespace {

class ColumnIndex {
 public:
  WordIndex get(const std::string& w) {
    auto [it, inserted] = index_.emplace(w, static_cast<WordIndex>(index_.size()));
    return it->second;
  }

 private:
  std::unordered_map<std::string, WordIndex> index_;
};

void count_contexts(std::span<const Sentence> corpus, const std::unordered_set<std::string>& targets,
                    std::size_t window, ColumnIndex& columns,
                    std::unordered_map<std::string, CountVector>& out,
                    std::unordered_set<std::string>& seen) {
  std::vector<WordIndex> cols;
  for (const auto& s : corpus) {
    cols.clear();
    for (const auto& tok : s.tokens) cols.push_back(columns.get(tok));
    const std::size_t n = s.tokens.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (!targets.count(s.tokens[i])) continue;
      seen.insert(s.tokens[i]);
      auto& vec = out[s.tokens[i]];
      const std::size_t lo = i >= window ? i - window : 0;
      const std::size_t hi = std::min(n - 1, i + window);
      for (std::size_t j = lo; j <= hi; ++j)
        if (j != i) ++vec[cols[j]];
    }
  }
}

}  // namespace

CollocationResult collocation_baseline(std::span<const Sentence> c1, std::span<const Sentence> c2,
                                       const std::vector<std::string>& targets, std::size_t window) {
  if (window < 1) throw DataError("collocation window must be >= 1");
  const std::unordered_set<std::string> target_set(targets.begin(), targets.end());
  ColumnIndex columns;
  std::unordered_map<std::string, CountVector> v1, v2;
  std::unordered_set<std::string> seen1, seen2;
  count_contexts(c1, target_set, window, columns, v1, seen1);
  count_contexts(c2, target_set, window, columns, v2, seen2);

  CollocationResult out;
  for (const auto& t : targets) {
    const bool in1 = seen1.count(t) > 0, in2 = seen2.count(t) > 0;
    if (!in1 || !in2) {
      out.missing.push_back({t, !in1 && !in2 ? MissingReason::AbsentFromBoth
                                : !in1       ? MissingReason::AbsentFromC1
                                             : MissingReason::AbsentFromC2});
      continue;
    }
    auto& a = v1[t];
    auto& b = v2[t];
    if (a.empty() || b.empty()) {
      out.missing.push_back({t, MissingReason::ZeroVector});
      continue;
    }
    out.scores.emplace_back(t, cosine_distance(a, b));
    out.vectors.emplace(t, std::make_pair(a, b));
  }
  return out;
}

std::vector<WordScore> majority_baseline(const std::vector<std::string>& targets) {
  std::vector<WordScore> out;
  out.reserve(targets.size());
  for (const auto& t : targets) out.emplace_back(t, 0.0);
  return out;
}

}  // namespace lscd
