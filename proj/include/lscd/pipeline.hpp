#pragma once

// File-to-file pipeline stages and the chained `run`. Every stage reads and
// writes the formats of the owning module, so `run` is literally the
// composition of the standalone stages.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "lscd/alignment.hpp"
#include "lscd/baselines.hpp"
#include "lscd/change.hpp"
#include "lscd/evaluation.hpp"
#include "lscd/sgns.hpp"

namespace lscd {

namespace fs = std::filesystem;

// Exit codes of the command-line tool.
enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

// Maps the exception currently being handled to an exit code.
int exit_code_for_current_exception();

EmbeddingMatrix train_stage(const fs::path& corpus, const Hyperparams& hp, const fs::path& out,
                            std::ostream* log = nullptr);

// Writes aligned1.txt, aligned2.txt and W.txt (d x d) under out_dir.
AlignedPair align_stage(const fs::path& emb1, const fs::path& emb2, const AlignOptions& opts,
                        const fs::path& out_dir, std::ostream* log = nullptr);

// Scores every shared word of two aligned embedding files; writes the score
// TSV (descending CD) and `missing` (word<TAB>reason) when given.
ChangeScores score_stage(const fs::path& aligned1, const fs::path& aligned2, const fs::path& targets,
                         const fs::path& scores_out, const fs::path& missing_out,
                         std::ostream* log = nullptr);

struct ThresholdOptions {
  ThresholdMethod method = ThresholdMethod::MeanStd;
  StdMode std_mode = StdMode::Population;
  double sigma_scale = 1.0;
};

// median-split needs the target list.
ThresholdDecision threshold_stage(const fs::path& scores, const std::optional<fs::path>& targets,
                                  const ThresholdOptions& opts, const fs::path& out);

struct LabelOutputs {
  fs::path labels;
  std::optional<fs::path> histogram;
  std::size_t bins = 50;
  std::optional<fs::path> gold;  // marks histogram targets correct/incorrect
};

std::vector<WordLabel> label_stage(const fs::path& scores, const fs::path& targets, double threshold,
                                   const LabelOutputs& out, std::ostream* log = nullptr);

struct BaselineOptions {
  BaselineKind kind = BaselineKind::Frequency;
  std::size_t window = 10;
  bool raw_counts = false;
  StdMode std_mode = StdMode::Population;
};

// Writes target scores and μ+σ labels (all 0 for majority).
void baseline_stage(const fs::path& corpus1, const fs::path& corpus2, const fs::path& targets,
                    const BaselineOptions& opts, const fs::path& scores_out,
                    const fs::path& labels_out, std::ostream* log = nullptr);

// Without a score file, AP is computed from the labels themselves.
EvalReport eval_stage(const fs::path& labels, const fs::path& gold,
                      const std::optional<fs::path>& scores, const fs::path& out);

struct RunConfig {
  fs::path corpus1;
  fs::path corpus2;
  fs::path targets;
  std::optional<fs::path> gold;
  fs::path out_dir;
  Hyperparams hp;
  // Seed for the second corpus; defaults to hp.seed + 1 so identical corpora
  // still get independent training runs.
  std::optional<std::uint64_t> seed2;
  ThresholdOptions threshold;
  AlignOptions align;
  std::optional<BaselineKind> baseline;
  bool raw_counts = false;
  std::size_t bins = 50;

  std::uint64_t second_seed() const { return seed2 ? *seed2 : hp.seed + 1; }
  // Throws DataError naming the first missing input path.
  void validate() const;
};

// File names inside the run directory.
namespace run_files {
inline constexpr const char* kManifest = "manifest.txt";
inline constexpr const char* kEmbeddings1 = "embeddings1.txt";
inline constexpr const char* kEmbeddings2 = "embeddings2.txt";
inline constexpr const char* kAligned1 = "aligned1.txt";
inline constexpr const char* kAligned2 = "aligned2.txt";
inline constexpr const char* kMap = "W.txt";
inline constexpr const char* kScores = "scores.tsv";
inline constexpr const char* kMissing = "missing.tsv";
inline constexpr const char* kThreshold = "threshold.tsv";
inline constexpr const char* kLabels = "labels.tsv";
inline constexpr const char* kHistogram = "histogram.tsv";
inline constexpr const char* kReport = "report.tsv";
inline constexpr const char* kBaselineScores = "baseline_scores.tsv";
inline constexpr const char* kBaselineLabels = "baseline_labels.tsv";
inline constexpr const char* kBaselineReport = "baseline_report.tsv";
}  // namespace run_files

// key=value lines readable back as a `run --config` file.
std::string manifest_text(const RunConfig& config, const std::string& status,
                          const std::string& stage = "", const std::string& error = "");

class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what, int exit_code)
      : std::runtime_error("stage " + stage + ": " + what),
        stage_(std::move(stage)),
        exit_code_(exit_code) {}

  const std::string& stage() const { return stage_; }
  int exit_code() const { return exit_code_; }

 private:
  std::string stage_;
  int exit_code_;
};

// Runs every stage into config.out_dir. On failure the manifest is rewritten
// with status=FAILED and a StageError is thrown; finished artifacts stay.
void run_pipeline(const RunConfig& config, std::ostream* log = nullptr);

}  // namespace lscd
