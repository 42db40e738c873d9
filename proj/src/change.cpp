#include "lscd/change.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "lscd/error.hpp"
#include "lscd/textio.hpp"

namespace lscd {

double cosine_distance(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw DataError("cosine_distance: dimension mismatch");
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uv += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw NumericError("undefined distance for zero vector");
  const double cd = 1.0 - uv / (std::sqrt(uu) * std::sqrt(vv));
  return std::clamp(cd, 0.0, 2.0);
}

const char* to_string(MissingReason r) {
  switch (r) {
    case MissingReason::AbsentFromC1: return "absent_from_c1";
    case MissingReason::AbsentFromC2: return "absent_from_c2";
    case MissingReason::AbsentFromBoth: return "absent_from_both";
    case MissingReason::NotShared: return "not_shared";
    case MissingReason::ZeroVector: return "zero_vector";
  }
  return "unknown";
}

std::vector<double> ChangeScores::values() const {
  std::vector<double> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(w.cd);
  return out;
}

std::optional<double> ChangeScores::find(const std::string& word) const {
  for (const auto& w : words)
    if (w.word == word) return w.cd;
  return std::nullopt;
}

std::vector<WordScore> ChangeScores::target_scores() const {
  std::vector<WordScore> out;
  for (const auto& t : targets)
    if (auto cd = find(t)) out.emplace_back(t, *cd);
  return out;
}

std::vector<WordScore> ChangeScores::ranking() const {
  std::vector<WordScore> out;
  out.reserve(words.size());
  for (const auto& w : words) out.emplace_back(w.word, w.cd);
  sort_ranking(out);
  return out;
}

ChangeScores score_all(const AlignedPair& aligned, const std::vector<std::string>& targets,
                       const Vocabulary* vocab1, const Vocabulary* vocab2) {
  ChangeScores out;
  out.targets = targets;
  const std::unordered_set<std::string> target_set(targets.begin(), targets.end());
  std::unordered_set<std::string> zero;
  const auto d = static_cast<std::size_t>(aligned.a.cols());
  out.words.reserve(aligned.map.size());
  for (std::size_t i = 0; i < aligned.map.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    std::span<const double> u(aligned.a.row(r).data(), d);
    std::span<const double> v(aligned.b.row(r).data(), d);
    const auto& w = aligned.map.words[i];
    try {
      out.words.push_back({w, cosine_distance(u, v), target_set.count(w) > 0});
    } catch (const NumericError&) {
      zero.insert(w);
    }
  }
  for (const auto& t : targets) {
    if (out.find(t)) continue;
    MissingReason reason = MissingReason::NotShared;
    if (zero.count(t)) {
      reason = MissingReason::ZeroVector;
    } else if (vocab1 && vocab2) {
      const bool in1 = vocab1->contains(t), in2 = vocab2->contains(t);
      reason = !in1 && !in2 ? MissingReason::AbsentFromBoth
               : !in1       ? MissingReason::AbsentFromC1
                            : MissingReason::AbsentFromC2;
    }
    out.missing.push_back({t, reason});
  }
  return out;
}

ChangeScores scores_from_table(const std::vector<WordScore>& table,
                               const std::vector<std::string>& targets) {
  ChangeScores out;
  out.targets = targets;
  const std::unordered_set<std::string> target_set(targets.begin(), targets.end());
  for (const auto& [w, cd] : table) out.words.push_back({w, cd, target_set.count(w) > 0});
  for (const auto& t : targets)
    if (!out.find(t)) out.missing.push_back({t, MissingReason::NotShared});
  return out;
}

const char* to_string(ThresholdMethod m) {
  return m == ThresholdMethod::MeanStd ? "mean-std" : "median-split";
}

const char* to_string(StdMode m) { return m == StdMode::Population ? "population" : "sample"; }

ThresholdMethod parse_threshold_method(const std::string& s) {
  if (s == "mean-std") return ThresholdMethod::MeanStd;
  if (s == "median-split") return ThresholdMethod::MedianSplit;
  throw DataError("unknown threshold method '" + s + "'");
}

StdMode parse_std_mode(const std::string& s) {
  if (s == "population") return StdMode::Population;
  if (s == "sample") return StdMode::Sample;
  throw DataError("unknown std mode '" + s + "'");
}

ThresholdDecision threshold_mean_std(std::span<const double> cds, StdMode mode, double sigma_scale) {
  if (cds.size() < 2) throw DataError("mean-std threshold needs at least 2 scores");
  const double n = static_cast<double>(cds.size());
  const double mu = std::accumulate(cds.begin(), cds.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : cds) ss += (x - mu) * (x - mu);
  const double var = ss / (mode == StdMode::Population ? n : n - 1.0);
  ThresholdDecision t;
  t.method = ThresholdMethod::MeanStd;
  t.mu = mu;
  t.sigma = std::sqrt(var);
  t.sigma_scale = sigma_scale;
  t.std_mode = mode;
  t.value = mu + sigma_scale * t.sigma;
  if (!std::isfinite(t.value)) throw NumericError("mean-std threshold is not finite");
  return t;
}

ThresholdDecision threshold_mean_std(const ChangeScores& scores, StdMode mode, double sigma_scale) {
  const auto v = scores.values();
  return threshold_mean_std(std::span<const double>(v), mode, sigma_scale);
}

ThresholdDecision threshold_median_split(std::span<const double> target_cds) {
  if (target_cds.size() < 2) throw DataError("median split needs at least 2 targets");
  std::vector<double> sorted(target_cds.begin(), target_cds.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) throw DataError("no split point");
  const std::size_t lower = (sorted.size() + 1) / 2;  // ceil(n/2), 1-based
  ThresholdDecision t;
  t.method = ThresholdMethod::MedianSplit;
  t.value = 0.5 * (sorted[lower - 1] + sorted[lower]);
  const double n = static_cast<double>(sorted.size());
  t.mu = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : sorted) ss += (x - t.mu) * (x - t.mu);
  t.sigma = std::sqrt(ss / n);
  return t;
}

std::vector<WordLabel> binarize(const ChangeScores& scores, double threshold) {
  if (!std::isfinite(threshold)) throw NumericError("threshold is not finite");
  std::vector<WordLabel> out;
  out.reserve(scores.targets.size());
  for (const auto& t : scores.targets) {
    auto cd = scores.find(t);
    out.emplace_back(t, cd ? binarize(*cd, threshold) : 0);
  }
  return out;
}

void write_threshold(const std::filesystem::path& path, const ThresholdDecision& t) {
  KeyValues kv{{"method", to_string(t.method)},
               {"mu", textio::format_double(t.mu)},
               {"sigma", textio::format_double(t.sigma)},
               {"sigma_scale", textio::format_double(t.sigma_scale)},
               {"std_mode", to_string(t.std_mode)},
               {"value", textio::format_double(t.value)}};
  write_key_values(path, kv);
}

ThresholdDecision read_threshold(const std::filesystem::path& path) {
  const auto kv = read_key_values(path);
  auto get = [&](const std::string& key) -> const std::string& {
    const std::string* v = find_value(kv, key);
    if (!v) throw ParseError(path.string(), 0, "missing key '" + key + "'");
    return *v;
  };
  auto number = [&](const std::string& key) {
    auto v = textio::parse_double(get(key));
    if (!v) throw ParseError(path.string(), 0, "bad number for '" + key + "'");
    return *v;
  };
  ThresholdDecision t;
  t.method = parse_threshold_method(get("method"));
  t.value = number("value");
  t.mu = number("mu");
  t.sigma = number("sigma");
  if (find_value(kv, "sigma_scale")) t.sigma_scale = number("sigma_scale");
  if (const auto* m = find_value(kv, "std_mode")) t.std_mode = parse_std_mode(*m);
  return t;
}

Histogram export_histogram(const ChangeScores& scores, std::size_t bins, double threshold,
                           const std::vector<WordLabel>* gold) {
  if (bins < 1) throw DataError("histogram needs at least one bin");
  Histogram h;
  h.threshold = threshold;
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = 2.0 * static_cast<double>(i) / static_cast<double>(bins);
  h.counts.assign(bins, 0);
  for (const auto& w : scores.words) {
    auto bin = static_cast<std::size_t>(std::floor(w.cd / 2.0 * static_cast<double>(bins)));
    h.counts[std::min(bin, bins - 1)]++;
  }
  std::unordered_map<std::string, int> gold_map;
  if (gold)
    for (const auto& [w, l] : *gold) gold_map.emplace(w, l);
  for (const auto& [w, cd] : scores.target_scores()) {
    HistogramTarget t{w, cd, std::nullopt};
    if (auto it = gold_map.find(w); it != gold_map.end()) t.correct = binarize(cd, threshold) == it->second;
    h.targets.push_back(std::move(t));
  }
  return h;
}

void write_histogram(const std::filesystem::path& path, const Histogram& h) {
  std::string out;
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    out += textio::format_double(h.edges[i]) + "\t" + textio::format_double(h.edges[i + 1]) + "\t" +
           std::to_string(h.counts[i]) + "\n";
  for (const auto& t : h.targets) {
    const char* flag = !t.correct ? "unknown" : *t.correct ? "correct" : "incorrect";
    out += "target\t" + t.word + "\t" + textio::format_double(t.cd) + "\t" + flag + "\n";
  }
  out += "threshold\t" + textio::format_double(h.threshold) + "\n";
  textio::write_file(path, out);
}

}  // namespace lscd
