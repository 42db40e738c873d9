#include "lscd/pipeline.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "lscd/error.hpp"
#include "lscd/textio.hpp"

namespace lscd {

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const StageError& e) {
    return e.exit_code();
  } catch (const NumericError&) {
    return kNumeric;
  } catch (const std::domain_error&) {
    return kNumeric;
  } catch (const DataError&) {
    return kData;
  } catch (...) {
    return kData;
  }
}

namespace {

void note(std::ostream* log, const std::string& msg) {
  if (log) *log << msg << '\n';
}

std::vector<std::string> load_targets(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("targets file not found: " + path.string());
  return textio::read_word_list(path);
}

}  // namespace

EmbeddingMatrix train_stage(const fs::path& corpus_path, const Hyperparams& hp, const fs::path& out,
                            std::ostream* log) {
  if (!fs::exists(corpus_path)) throw IoError("corpus file not found: " + corpus_path.string());
  const Corpus corpus = load_corpus(corpus_path);
  TrainingStats stats;
  EmbeddingMatrix model = train_sgns(corpus, hp, &stats);
  note(log, "trained " + corpus_path.string() + ": |V|=" + std::to_string(model.vocab.size()) +
                " d=" + std::to_string(hp.dim) + " pairs=" + std::to_string(stats.pairs));
  save_embeddings(model, out);
  return model;
}

AlignedPair align_stage(const fs::path& emb1, const fs::path& emb2, const AlignOptions& opts,
                        const fs::path& out_dir, std::ostream* log) {
  const EmbeddingMatrix a = load_embeddings(emb1);
  const EmbeddingMatrix b = load_embeddings(emb2);
  AlignedPair pair = align(a, b, opts);
  if (pair.zero_rows > 0)
    note(log, "warning: " + std::to_string(pair.zero_rows) + " zero rows during normalization");
  note(log, "aligned " + std::to_string(pair.map.size()) + " shared words");
  fs::create_directories(out_dir);
  save_embeddings(aligned_side(pair, a, true), out_dir / run_files::kAligned1);
  save_embeddings(aligned_side(pair, b, false), out_dir / run_files::kAligned2);
  save_matrix(pair.w.w, out_dir / run_files::kMap);
  return pair;
}

ChangeScores score_stage(const fs::path& aligned1, const fs::path& aligned2, const fs::path& targets,
                         const fs::path& scores_out, const fs::path& missing_out,
                         std::ostream* log) {
  const auto target_list = load_targets(targets);
  const EmbeddingMatrix a = load_embeddings(aligned1);
  const EmbeddingMatrix b = load_embeddings(aligned2);
  if (a.vocab.words() != b.vocab.words())
    throw DataError("aligned files must list the same words in the same order: " +
                    aligned1.string() + ", " + aligned2.string());
  if (a.dim() != b.dim()) throw DataError("aligned files differ in dimension");

  AlignedPair pair;
  pair.map.words = a.vocab.words();
  for (std::size_t i = 0; i < a.vocab.size(); ++i) {
    pair.map.rows_a.push_back(static_cast<WordIndex>(i));
    pair.map.rows_b.push_back(static_cast<WordIndex>(i));
  }
  pair.a = a.word_vectors;
  pair.b = b.word_vectors;
  ChangeScores scores = score_all(pair, target_list);

  write_scores(scores_out, scores.ranking());
  std::string missing;
  for (const auto& m : scores.missing) {
    missing += m.word + "\t" + to_string(m.reason) + "\n";
    note(log, "warning: target '" + m.word + "' has no score (" + to_string(m.reason) +
                  "), labeled 0");
  }
  if (!missing_out.empty()) textio::write_file(missing_out, missing);
  return scores;
}

ThresholdDecision threshold_stage(const fs::path& scores, const std::optional<fs::path>& targets,
                                  const ThresholdOptions& opts, const fs::path& out) {
  const auto table = read_scores(scores);
  ThresholdDecision decision;
  if (opts.method == ThresholdMethod::MeanStd) {
    std::vector<double> values;
    values.reserve(table.size());
    for (const auto& [w, cd] : table) values.push_back(cd);
    decision = threshold_mean_std(std::span<const double>(values), opts.std_mode, opts.sigma_scale);
  } else {
    if (!targets) throw DataError("median-split threshold needs a targets file");
    const auto ts = scores_from_table(table, load_targets(*targets)).target_scores();
    std::vector<double> values;
    for (const auto& [w, cd] : ts) values.push_back(cd);
    decision = threshold_median_split(std::span<const double>(values));
  }
  write_threshold(out, decision);
  return decision;
}

std::vector<WordLabel> label_stage(const fs::path& scores, const fs::path& targets, double threshold,
                                   const LabelOutputs& out, std::ostream* log) {
  const ChangeScores cs = scores_from_table(read_scores(scores), load_targets(targets));
  for (const auto& m : cs.missing) note(log, "warning: target '" + m.word + "' unscored, labeled 0");
  auto labels = binarize(cs, threshold);
  write_labels(out.labels, labels);
  if (out.histogram) {
    std::optional<GoldData> gold;
    if (out.gold) gold = load_gold(*out.gold);
    const Histogram h = export_histogram(cs, out.bins, threshold, gold ? &gold->labels : nullptr);
    write_histogram(*out.histogram, h);
  }
  return labels;
}

void baseline_stage(const fs::path& corpus1, const fs::path& corpus2, const fs::path& targets,
                    const BaselineOptions& opts, const fs::path& scores_out,
                    const fs::path& labels_out, std::ostream* log) {
  const auto target_list = load_targets(targets);
  std::vector<WordScore> scores;
  std::vector<WordLabel> labels;
  auto label_with = [&](double threshold) {
    for (const auto& t : target_list) {
      double s = -std::numeric_limits<double>::infinity();
      for (const auto& [w, v] : scores)
        if (w == t) s = v;
      labels.emplace_back(t, binarize(s, threshold));
    }
  };

  if (opts.kind == BaselineKind::Majority) {
    scores = majority_baseline(target_list);
    for (const auto& t : target_list) labels.emplace_back(t, 0);
  } else {
    const Corpus c1 = load_corpus(corpus1);
    const Corpus c2 = load_corpus(corpus2);
    if (opts.kind == BaselineKind::Frequency) {
      const CorpusStats stats = corpus_stats(c1, c2);
      scores = frequency_baseline(stats, target_list, opts.raw_counts);
      std::vector<double> all;
      for (const auto& [w, v] : frequency_scores_all(stats, opts.raw_counts)) all.push_back(v);
      label_with(threshold_mean_std(std::span<const double>(all), opts.std_mode).value);
    } else {
      const auto result = collocation_baseline(c1, c2, target_list, opts.window);
      scores = result.scores;
      for (const auto& m : result.missing)
        note(log, "warning: target '" + m.word + "' missing for collocation baseline (" +
                      to_string(m.reason) + "), labeled 0");
      std::vector<double> all;
      for (const auto& [w, v] : scores) all.push_back(v);
      if (all.size() >= 2)
        label_with(threshold_mean_std(std::span<const double>(all), opts.std_mode).value);
      else
        for (const auto& t : target_list) labels.emplace_back(t, 0);
    }
  }
  auto ranked = scores;
  sort_ranking(ranked);
  write_scores(scores_out, ranked);
  write_labels(labels_out, labels);
}

EvalReport eval_stage(const fs::path& labels, const fs::path& gold,
                      const std::optional<fs::path>& scores, const fs::path& out) {
  const auto pred = read_labels(labels);
  const GoldData g = load_gold(gold);
  std::vector<WordScore> score_table;
  if (scores) {
    const auto table = read_scores(*scores);
    // Unscored gold words rank below everything.
    for (const auto& [w, l] : g.labels) {
      double s = -std::numeric_limits<double>::infinity();
      for (const auto& [sw, v] : table)
        if (sw == w) {
          s = v;
          break;
        }
      score_table.emplace_back(w, s);
    }
  } else {
    for (const auto& [w, l] : pred) score_table.emplace_back(w, static_cast<double>(l));
  }
  const EvalReport r = report(pred, score_table, g);
  write_report(out, r);
  return r;
}

void RunConfig::validate() const {
  hp.validate();
  for (const auto* p : {&corpus1, &corpus2, &targets})
    if (!fs::exists(*p)) throw IoError("input file not found: " + p->string());
  if (gold && !fs::exists(*gold)) throw IoError("input file not found: " + gold->string());
  if (out_dir.empty()) throw DataError("output directory not set");
  if (bins < 1) throw DataError("bins must be >= 1");
}

namespace {

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

std::string flat(std::string s) {
  for (auto& c : s)
    if (c == '\n' || c == '"') c = ' ';
  return s;
}

}  // namespace

std::string manifest_text(const RunConfig& c, const std::string& status, const std::string& stage,
                          const std::string& error) {
  std::ostringstream out;
  auto b = [](bool v) { return v ? "true" : "false"; };
  out << "corpus1=" << quoted(c.corpus1) << '\n'
      << "corpus2=" << quoted(c.corpus2) << '\n'
      << "targets=" << quoted(c.targets) << '\n';
  if (c.gold) out << "gold=" << quoted(*c.gold) << '\n';
  out << "out=" << quoted(c.out_dir) << '\n'
      << "dim=" << c.hp.dim << '\n'
      << "window=" << c.hp.window << '\n'
      << "negatives=" << c.hp.negatives << '\n'
      << "alpha=" << textio::format_double(c.hp.alpha) << '\n'
      << "subsample=" << textio::format_double(c.hp.subsample) << '\n'
      << "epochs=" << c.hp.epochs << '\n'
      << "min-count=" << c.hp.min_count << '\n'
      << "ns-exponent=" << textio::format_double(c.hp.ns_exponent) << '\n'
      << "seed=" << c.hp.seed << '\n'
      << "seed2=" << c.second_seed() << '\n'
      << "dynamic-window=" << b(c.hp.dynamic_window) << '\n'
      << "deterministic=" << b(c.hp.threads == 1) << '\n'
      << "threads=" << c.hp.threads << '\n'
      << "threshold-method=" << to_string(c.threshold.method) << '\n'
      << "std-mode=" << to_string(c.threshold.std_mode) << '\n'
      << "sigma-scale=" << textio::format_double(c.threshold.sigma_scale) << '\n'
      << "normalize=" << b(c.align.normalize) << '\n'
      << "center=" << b(c.align.center) << '\n'
      << "renormalize=" << b(c.align.renormalize) << '\n'
      << "align-top-n=" << c.align.fit_top_n << '\n';
  if (c.baseline) out << "baseline=" << to_string(*c.baseline) << '\n';
  out << "raw-counts=" << b(c.raw_counts) << '\n'
      << "bins=" << c.bins << '\n'
      << "status=" << status << '\n';
  if (!stage.empty()) out << "failed-stage=" << stage << '\n';
  if (!error.empty()) out << "error=\"" << flat(error) << "\"\n";
  return out.str();
}

void run_pipeline(const RunConfig& config, std::ostream* log) {
  std::string stage = "validate";
  const fs::path dir = config.out_dir;
  const fs::path manifest = dir / run_files::kManifest;
  try {
    config.validate();
    fs::create_directories(dir);
    textio::write_file(manifest, manifest_text(config, "RUNNING"));

    stage = "train";
    Hyperparams hp1 = config.hp;
    Hyperparams hp2 = config.hp;
    hp2.seed = config.second_seed();
    train_stage(config.corpus1, hp1, dir / run_files::kEmbeddings1, log);
    train_stage(config.corpus2, hp2, dir / run_files::kEmbeddings2, log);

    stage = "align";
    align_stage(dir / run_files::kEmbeddings1, dir / run_files::kEmbeddings2, config.align, dir, log);

    stage = "score";
    score_stage(dir / run_files::kAligned1, dir / run_files::kAligned2, config.targets,
                dir / run_files::kScores, dir / run_files::kMissing, log);

    stage = "threshold";
    const ThresholdDecision t = threshold_stage(dir / run_files::kScores, config.targets,
                                                config.threshold, dir / run_files::kThreshold);
    note(log, std::string("threshold (") + to_string(t.method) + ") = " + textio::format_fixed(t.value, 6));

    stage = "label";
    LabelOutputs lo;
    lo.labels = dir / run_files::kLabels;
    lo.histogram = dir / run_files::kHistogram;
    lo.bins = config.bins;
    lo.gold = config.gold;
    label_stage(dir / run_files::kScores, config.targets, t.value, lo, log);

    if (config.baseline) {
      stage = "baseline";
      BaselineOptions bo;
      bo.kind = *config.baseline;
      bo.window = config.hp.window;
      bo.raw_counts = config.raw_counts;
      bo.std_mode = config.threshold.std_mode;
      baseline_stage(config.corpus1, config.corpus2, config.targets, bo,
                     dir / run_files::kBaselineScores, dir / run_files::kBaselineLabels, log);
    }

    if (config.gold) {
      stage = "eval";
      const EvalReport r = eval_stage(dir / run_files::kLabels, *config.gold, dir / run_files::kScores,
                                      dir / run_files::kReport);
      note(log, "accuracy=" + textio::format_fixed(r.accuracy, 4) + " AP=" +
                    (r.average_precision ? textio::format_fixed(*r.average_precision, 4) : "NA"));
      if (config.baseline)
        eval_stage(dir / run_files::kBaselineLabels, *config.gold, dir / run_files::kBaselineScores,
                   dir / run_files::kBaselineReport);
    }

    stage = "manifest";
    textio::write_file(manifest, manifest_text(config, "OK"));
  } catch (const std::exception& e) {
    const int code = exit_code_for_current_exception();
    try {
      if (fs::exists(dir)) textio::write_file(manifest, manifest_text(config, "FAILED", stage, e.what()));
    } catch (...) {
    }
    throw StageError(stage, e.what(), code);
  }
}

}  // namespace lscd
