#pragma once

// Binary-label accuracy and ranking average precision against gold labels.

#include <filesystem>
#include <optional>
#include <vector>

#include "lscd/tables.hpp"

namespace lscd {

struct GoldData {
  std::vector<WordLabel> labels;  // file order

  std::size_t size() const { return labels.size(); }
  std::size_t positives() const;
};

// TSV `word<TAB>{0|1}`; duplicates and other labels are ParseErrors.
GoldData load_gold(const std::filesystem::path& path);

// Fraction of exact matches. The prediction and gold word sets must be equal;
// otherwise DataError lists the words missing on either side.
double accuracy(const std::vector<WordLabel>& pred, const GoldData& gold);

// Sum over distinct score values v (descending) of (R_v - R_prev) * P_v where
// P_v, R_v are precision and recall of {score >= v}. Ties form one step.
// Label 1 is the positive class. Throws NumericError("AP undefined") without
// positives; every gold word needs a score.
double average_precision(const std::vector<WordScore>& scores, const GoldData& gold);

struct EvalReport {
  double accuracy = 0.0;
  std::optional<double> average_precision;
  std::size_t n_targets = 0;
  std::size_t n_positive = 0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

// AP is left empty when the gold set has no positives.
EvalReport report(const std::vector<WordLabel>& pred, const std::vector<WordScore>& scores,
                  const GoldData& gold);

void write_report(const std::filesystem::path& path, const EvalReport& r);

}  // namespace lscd
