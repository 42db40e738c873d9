// Command-line front end: one subcommand per pipeline stage plus `run`.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "lscd/error.hpp"
#include "lscd/pipeline.hpp"
#include "lscd/synth.hpp"
#include "lscd/textio.hpp"

namespace {

using namespace lscd;

struct HpFlags {
  Hyperparams hp;
  bool deterministic = true;
  bool fixed_window = false;
};

void add_hyperparams(CLI::App* app, HpFlags& f) {
  app->add_option("--dim", f.hp.dim, "embedding dimensionality")->capture_default_str();
  app->add_option("--window", f.hp.window, "maximum context window")->capture_default_str();
  app->add_option("--negatives", f.hp.negatives, "negative samples per pair")->capture_default_str();
  app->add_option("--alpha", f.hp.alpha, "initial learning rate")->capture_default_str();
  app->add_option("--subsample", f.hp.subsample, "subsampling threshold t (inf disables)")
      ->capture_default_str();
  app->add_option("--epochs", f.hp.epochs, "training epochs")->capture_default_str();
  app->add_option("--min-count", f.hp.min_count, "vocabulary frequency floor")->capture_default_str();
  app->add_option("--ns-exponent", f.hp.ns_exponent, "noise distribution exponent")
      ->capture_default_str();
  app->add_option("--seed", f.hp.seed, "random seed")->capture_default_str();
  app->add_option("--threads", f.hp.threads, "worker threads when not deterministic")
      ->capture_default_str();
  app->add_flag("--deterministic,!--no-deterministic", f.deterministic,
                "single-threaded bit-reproducible training (default on)");
  app->add_flag("--fixed-window", f.fixed_window, "disable dynamic window shrinking");
}

Hyperparams finish(const HpFlags& f) {
  Hyperparams hp = f.hp;
  if (f.deterministic) hp.threads = 1;
  hp.dynamic_window = !f.fixed_window;
  return hp;
}

void add_align_flags(CLI::App* app, AlignOptions& opts) {
  app->add_flag("--normalize,!--no-normalize", opts.normalize, "length-normalize before centering");
  app->add_flag("--center,!--no-center", opts.center, "mean-center");
  app->add_flag("--renormalize,!--no-renormalize", opts.renormalize, "length-normalize after centering");
  app->add_option("--align-top-n", opts.fit_top_n, "fit W* on the n most frequent shared words (0 = all)");
}

std::string threshold_method_str = "mean-std";
std::string std_mode_str = "population";

ThresholdOptions threshold_options(double sigma_scale) {
  ThresholdOptions t;
  t.method = parse_threshold_method(threshold_method_str);
  t.std_mode = parse_std_mode(std_mode_str);
  t.sigma_scale = sigma_scale;
  return t;
}

// Flat key=value files belong to the `run` subcommand.
class RunConfigFile : public CLI::ConfigBase {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigBase::from_config(input);
    for (auto& item : items)
      if (item.parents.empty()) item.parents.push_back("run");
    return items;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lexical semantic change detection: SGNS + orthogonal Procrustes + cosine distance"};
  app.require_subcommand(1);

  // train
  HpFlags train_hp;
  std::string train_corpus, train_out;
  auto* train = app.add_subcommand("train", "train SGNS embeddings on one corpus");
  train->add_option("--corpus", train_corpus, "corpus file (plain or gzip)")->required();
  train->add_option("--out", train_out, "embedding output file")->required();
  add_hyperparams(train, train_hp);

  // align
  std::string emb1, emb2, align_out;
  AlignOptions align_opts;
  auto* align_cmd = app.add_subcommand("align", "align two embedding files with orthogonal Procrustes");
  align_cmd->add_option("--emb1", emb1, "embeddings of C1 (reference side)")->required();
  align_cmd->add_option("--emb2", emb2, "embeddings of C2 (mapped side)")->required();
  align_cmd->add_option("--out-dir", align_out, "directory for aligned1.txt, aligned2.txt, W.txt")->required();
  add_align_flags(align_cmd, align_opts);

  // score
  std::string aligned1, aligned2, score_targets, score_out, score_missing;
  auto* score = app.add_subcommand("score", "cosine distances for every shared word");
  score->add_option("--aligned1", aligned1)->required();
  score->add_option("--aligned2", aligned2)->required();
  score->add_option("--targets", score_targets, "target word list")->required();
  score->add_option("--out", score_out, "score TSV")->required();
  score->add_option("--missing", score_missing, "missing-target report TSV");

  // threshold
  std::string thr_scores, thr_targets, thr_out;
  double thr_sigma_scale = 1.0;
  auto* threshold = app.add_subcommand("threshold", "derive a change threshold from a score TSV");
  threshold->add_option("--scores", thr_scores)->required();
  threshold->add_option("--targets", thr_targets, "target list (median-split)");
  threshold->add_option("--method,--threshold-method", threshold_method_str)
      ->check(CLI::IsMember({"mean-std", "median-split"}))
      ->capture_default_str();
  threshold->add_option("--std-mode", std_mode_str)
      ->check(CLI::IsMember({"population", "sample"}))
      ->capture_default_str();
  threshold->add_option("--sigma-scale", thr_sigma_scale, "threshold = mu + scale * sigma")
      ->capture_default_str();
  threshold->add_option("--out", thr_out, "threshold record TSV")->required();

  // label
  std::string lab_scores, lab_targets, lab_threshold_file, lab_out, lab_hist, lab_gold;
  std::optional<double> lab_threshold;
  std::size_t lab_bins = 50;
  auto* label = app.add_subcommand("label", "binary labels from scores and a threshold");
  label->add_option("--scores", lab_scores)->required();
  label->add_option("--targets", lab_targets)->required();
  auto* lab_value = label->add_option("--threshold", lab_threshold, "threshold value");
  auto* lab_file = label->add_option("--threshold-file", lab_threshold_file, "threshold record TSV");
  lab_value->excludes(lab_file);
  label->add_option("--out", lab_out, "label TSV")->required();
  label->add_option("--histogram", lab_hist, "histogram TSV");
  label->add_option("--bins", lab_bins)->capture_default_str();
  label->add_option("--gold", lab_gold, "gold labels for histogram correctness flags");

  // baseline
  std::string bl_kind = "freq", bl_c1, bl_c2, bl_targets, bl_scores, bl_labels;
  BaselineOptions bl_opts;
  auto* baseline = app.add_subcommand("baseline", "frequency, collocation or majority baseline");
  baseline->add_option("--baseline", bl_kind)
      ->check(CLI::IsMember({"freq", "colloc", "majority"}))
      ->capture_default_str();
  baseline->add_option("--corpus1", bl_c1);
  baseline->add_option("--corpus2", bl_c2);
  baseline->add_option("--targets", bl_targets)->required();
  baseline->add_option("--window", bl_opts.window)->capture_default_str();
  baseline->add_flag("--raw-counts", bl_opts.raw_counts, "frequency baseline without per-million normalization");
  baseline->add_option("--std-mode", std_mode_str)->check(CLI::IsMember({"population", "sample"}));
  baseline->add_option("--scores-out", bl_scores)->required();
  baseline->add_option("--labels-out", bl_labels)->required();

  // eval
  std::string ev_labels, ev_gold, ev_scores, ev_out;
  auto* eval = app.add_subcommand("eval", "accuracy and average precision against gold labels");
  eval->add_option("--labels", ev_labels)->required();
  eval->add_option("--gold", ev_gold)->required();
  eval->add_option("--scores", ev_scores, "score TSV for AP (defaults to the labels)");
  eval->add_option("--out", ev_out, "report TSV")->required();

  // synth
  std::string sy_out;
  std::uint64_t sy_seed = 1;
  SynthSpec sy_spec = SynthSpec::defaults();
  std::size_t sy_targets = 10, sy_changed = 5;
  double sy_mix = 1.0;
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus pair with known change");
  synth->add_option("--out-dir", sy_out)->required();
  synth->add_option("--seed", sy_seed)->capture_default_str();
  synth->add_option("--vocab-size", sy_spec.vocab_size)->capture_default_str();
  synth->add_option("--sentences", sy_spec.sentences)->capture_default_str();
  synth->add_option("--clusters", sy_spec.clusters)->capture_default_str();
  synth->add_option("--min-length", sy_spec.min_length)->capture_default_str();
  synth->add_option("--max-length", sy_spec.max_length)->capture_default_str();
  synth->add_option("--occurrences", sy_spec.target_occurrences, "occurrences per target per corpus")
      ->capture_default_str();
  synth->add_option("--ring-width", sy_spec.ring_width, "topic kernel width on the cluster ring (0 = flat)")
      ->capture_default_str();
  synth->add_option("--background", sy_spec.background, "share of topic-independent tokens")->capture_default_str();
  synth->add_option("--targets", sy_targets)->capture_default_str();
  synth->add_option("--changed", sy_changed)->capture_default_str();
  synth->add_option("--mix", sy_mix, "share of changed-target occurrences moved in C2")
      ->capture_default_str();

  // run
  HpFlags run_hp;
  RunConfig run_cfg;
  std::string run_c1, run_c2, run_targets, run_gold, run_out, run_baseline;
  std::optional<std::uint64_t> run_seed2;
  double run_sigma_scale = 1.0;
  auto* run = app.add_subcommand("run", "full pipeline: train, align, score, threshold, label, eval");
  app.config_formatter(std::make_shared<RunConfigFile>());
  app.set_config("--config", "", "key=value config file for `run` (flags override it)");
  app.allow_config_extras(CLI::config_extras_mode::ignore);
  run->fallthrough();
  run->allow_config_extras(CLI::config_extras_mode::ignore);
  run->add_option("--corpus1", run_c1)->required();
  run->add_option("--corpus2", run_c2)->required();
  run->add_option("--targets", run_targets)->required();
  run->add_option("--gold", run_gold);
  run->add_option("--out", run_out, "output directory")->required();
  add_hyperparams(run, run_hp);
  run->add_option("--seed2", run_seed2, "seed for the C2 model (default seed + 1)");
  run->add_flag("--dynamic-window,!--no-dynamic-window", run_hp.hp.dynamic_window);
  run->add_option("--threshold-method", threshold_method_str)
      ->check(CLI::IsMember({"mean-std", "median-split"}))
      ->capture_default_str();
  run->add_option("--std-mode", std_mode_str)
      ->check(CLI::IsMember({"population", "sample"}))
      ->capture_default_str();
  run->add_option("--sigma-scale", run_sigma_scale)->capture_default_str();
  add_align_flags(run, run_cfg.align);
  run->add_option("--baseline", run_baseline)->check(CLI::IsMember({"freq", "colloc", "majority"}));
  run->add_flag("--raw-counts", run_cfg.raw_counts);
  run->add_option("--bins", run_cfg.bins)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*train) {
      train_stage(train_corpus, finish(train_hp), train_out, &std::cerr);
    } else if (*align_cmd) {
      align_stage(emb1, emb2, align_opts, align_out, &std::cerr);
    } else if (*score) {
      score_stage(aligned1, aligned2, score_targets, score_out, score_missing, &std::cerr);
    } else if (*threshold) {
      std::optional<fs::path> targets;
      if (!thr_targets.empty()) targets = thr_targets;
      const auto t = threshold_stage(thr_scores, targets, threshold_options(thr_sigma_scale), thr_out);
      std::cout << textio::format_fixed(t.value, 6) << '\n';
    } else if (*label) {
      double value;
      if (lab_threshold) {
        value = *lab_threshold;
      } else if (!lab_threshold_file.empty()) {
        value = read_threshold(lab_threshold_file).value;
      } else {
        std::cerr << "label: one of --threshold or --threshold-file is required\n";
        return kUsage;
      }
      LabelOutputs out;
      out.labels = lab_out;
      if (!lab_hist.empty()) out.histogram = lab_hist;
      out.bins = lab_bins;
      if (!lab_gold.empty()) out.gold = lab_gold;
      label_stage(lab_scores, lab_targets, value, out, &std::cerr);
    } else if (*baseline) {
      bl_opts.kind = parse_baseline(bl_kind);
      bl_opts.std_mode = parse_std_mode(std_mode_str);
      if (bl_opts.kind != BaselineKind::Majority && (bl_c1.empty() || bl_c2.empty())) {
        std::cerr << "baseline: --corpus1 and --corpus2 are required for " << bl_kind << '\n';
        return kUsage;
      }
      baseline_stage(bl_c1, bl_c2, bl_targets, bl_opts, bl_scores, bl_labels, &std::cerr);
    } else if (*eval) {
      std::optional<fs::path> scores;
      if (!ev_scores.empty()) scores = ev_scores;
      const auto r = eval_stage(ev_labels, ev_gold, scores, ev_out);
      std::cout << "accuracy\t" << textio::format_fixed(r.accuracy, 4) << "\naverage_precision\t"
                << (r.average_precision ? textio::format_fixed(*r.average_precision, 4) : "NA") << '\n';
    } else if (*synth) {
      if (sy_changed > sy_targets) {
        std::cerr << "synth: --changed exceeds --targets\n";
        return kUsage;
      }
      sy_spec.targets.clear();
      for (std::size_t i = 0; i < sy_targets; ++i) {
        char name[16];
        std::snprintf(name, sizeof(name), "pw%02zu", i);
        const bool changed = i < sy_changed;
        sy_spec.targets.push_back({name, changed, changed ? sy_mix : 0.0});
      }
      const auto data = generate(sy_spec, sy_seed);
      for (const auto& c : data.checks)
        if (!c.ok) std::cerr << "warning: chi-square sanity check failed for " << c.word << '\n';
      write_synth(data, sy_out);
    } else if (*run) {
      run_cfg.corpus1 = run_c1;
      run_cfg.corpus2 = run_c2;
      run_cfg.targets = run_targets;
      if (!run_gold.empty()) run_cfg.gold = run_gold;
      run_cfg.out_dir = run_out;
      const bool dynamic = run_hp.hp.dynamic_window && !run_hp.fixed_window;
      run_cfg.hp = finish(run_hp);
      run_cfg.hp.dynamic_window = dynamic;
      run_cfg.seed2 = run_seed2;
      run_cfg.threshold = threshold_options(run_sigma_scale);
      if (!run_baseline.empty()) run_cfg.baseline = parse_baseline(run_baseline);
      run_pipeline(run_cfg, &std::cerr);
    }
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for_current_exception();
  }
  return kOk;
}
