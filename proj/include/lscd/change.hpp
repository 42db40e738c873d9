#pragma once

// Graded change scores (cosine distance between aligned vectors), the two
// thresholding rules, binary labels and histogram export.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lscd/alignment.hpp"
#include "lscd/tables.hpp"

namespace lscd {

// 1 - cos(u, v), clamped to [0, 2]. Throws NumericError for a zero vector.
double cosine_distance(std::span<const double> u, std::span<const double> v);

enum class MissingReason { AbsentFromC1, AbsentFromC2, AbsentFromBoth, NotShared, ZeroVector };

const char* to_string(MissingReason r);

struct MissingTarget {
  std::string word;
  MissingReason reason;
};

struct ScoredWord {
  std::string word;
  double cd;
  bool target;
};

struct ChangeScores {
  std::vector<ScoredWord> words;  // shared-vocabulary order
  std::vector<std::string> targets;
  std::vector<MissingTarget> missing;

  std::vector<double> values() const;
  std::optional<double> find(const std::string& word) const;
  // (word, cd) for targets present in `words`, in target-list order.
  std::vector<WordScore> target_scores() const;
  // All words, descending CD.
  std::vector<WordScore> ranking() const;
};

// Vocabularies are optional and only sharpen the missing-target reasons.
ChangeScores score_all(const AlignedPair& aligned, const std::vector<std::string>& targets,
                       const Vocabulary* vocab1 = nullptr, const Vocabulary* vocab2 = nullptr);

// Rebuilds scores from a score table (e.g. a scores TSV read back from disk).
ChangeScores scores_from_table(const std::vector<WordScore>& table,
                               const std::vector<std::string>& targets);

enum class ThresholdMethod { MeanStd, MedianSplit };
enum class StdMode { Population, Sample };

const char* to_string(ThresholdMethod m);
const char* to_string(StdMode m);
ThresholdMethod parse_threshold_method(const std::string& s);
StdMode parse_std_mode(const std::string& s);

struct ThresholdDecision {
  ThresholdMethod method = ThresholdMethod::MeanStd;
  double value = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
  double sigma_scale = 1.0;
  StdMode std_mode = StdMode::Population;
};

// value = mu + sigma_scale * sigma over every scored word. Needs >= 2 scores.
ThresholdDecision threshold_mean_std(std::span<const double> cds, StdMode mode = StdMode::Population,
                                     double sigma_scale = 1.0);
ThresholdDecision threshold_mean_std(const ChangeScores& scores, StdMode mode = StdMode::Population,
                                     double sigma_scale = 1.0);

// Midpoint between the ceil(n/2)-th and next-larger sorted target CD.
// Throws DataError("no split point") if all CDs are equal.
ThresholdDecision threshold_median_split(std::span<const double> target_cds);

inline int binarize(double cd, double threshold) { return cd >= threshold ? 1 : 0; }

// Labels in target-list order; missing targets get 0.
std::vector<WordLabel> binarize(const ChangeScores& scores, double threshold);

void write_threshold(const std::filesystem::path& path, const ThresholdDecision& t);
ThresholdDecision read_threshold(const std::filesystem::path& path);

struct HistogramTarget {
  std::string word;
  double cd;
  std::optional<bool> correct;
};

struct Histogram {
  std::vector<double> edges;  // bins + 1 edges over [0, 2]
  std::vector<std::size_t> counts;
  std::vector<HistogramTarget> targets;
  double threshold = 0.0;
};

Histogram export_histogram(const ChangeScores& scores, std::size_t bins, double threshold,
                           const std::vector<WordLabel>* gold = nullptr);

// `lo hi count` rows, then `target word cd {correct|incorrect|unknown}` rows,
// then `threshold value`; tab-separated.
void write_histogram(const std::filesystem::path& path, const Histogram& h);

}  // namespace lscd
