#include "lscd/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "lscd/error.hpp"
#include "lscd/textio.hpp"

namespace lscd {

std::size_t GoldData::positives() const {
  return static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [](const WordLabel& l) { return l.second == 1; }));
}

GoldData load_gold(const std::filesystem::path& path) { return GoldData{read_labels(path)}; }

namespace {

template <class T>
std::unordered_map<std::string, T> to_map(const std::vector<std::pair<std::string, T>>& v) {
  std::unordered_map<std::string, T> m;
  for (const auto& [k, x] : v)
    if (!m.emplace(k, x).second) throw DataError("duplicate word '" + k + "'");
  return m;
}

void check_same_words(const std::unordered_map<std::string, int>& pred, const GoldData& gold) {
  std::vector<std::string> no_pred, no_gold;
  std::unordered_map<std::string, int> g;
  for (const auto& [w, l] : gold.labels) {
    g.emplace(w, l);
    if (!pred.count(w)) no_pred.push_back(w);
  }
  for (const auto& [w, l] : pred)
    if (!g.count(w)) no_gold.push_back(w);
  if (no_pred.empty() && no_gold.empty()) return;
  std::sort(no_gold.begin(), no_gold.end());
  std::string msg = "target sets differ;";
  if (!no_pred.empty()) {
    msg += " no prediction for:";
    for (const auto& w : no_pred) msg += " " + w;
    msg += ";";
  }
  if (!no_gold.empty()) {
    msg += " no gold label for:";
    for (const auto& w : no_gold) msg += " " + w;
  }
  throw DataError(msg);
}

}  // namespace

double accuracy(const std::vector<WordLabel>& pred, const GoldData& gold) {
  const auto p = to_map(pred);
  check_same_words(p, gold);
  if (gold.labels.empty()) throw DataError("accuracy over an empty target set");
  std::size_t correct = 0;
  for (const auto& [w, l] : gold.labels)
    if (p.at(w) == l) ++correct;
  return static_cast<double>(correct) / static_cast<double>(gold.size());
}

double average_precision(const std::vector<WordScore>& scores, const GoldData& gold) {
  const auto s = to_map(scores);
  std::vector<std::pair<double, int>> items;
  items.reserve(gold.size());
  for (const auto& [w, l] : gold.labels) {
    auto it = s.find(w);
    if (it == s.end()) throw DataError("no score for gold word '" + w + "'");
    items.emplace_back(it->second, l);
  }
  const std::size_t positives = gold.positives();
  if (positives == 0) throw NumericError("AP undefined");
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  double ap = 0.0, prev_recall = 0.0;
  std::size_t tp = 0, taken = 0;
  std::size_t i = 0;
  while (i < items.size()) {
    const double v = items[i].first;
    while (i < items.size() && items[i].first == v) {
      tp += static_cast<std::size_t>(items[i].second);
      ++taken;
      ++i;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    const double precision = static_cast<double>(tp) / static_cast<double>(taken);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

EvalReport report(const std::vector<WordLabel>& pred, const std::vector<WordScore>& scores,
                  const GoldData& gold) {
  EvalReport r;
  r.accuracy = accuracy(pred, gold);
  const auto p = to_map(pred);
  for (const auto& [w, l] : gold.labels) {
    const int y = p.at(w);
    if (l == 1 && y == 1) ++r.tp;
    if (l == 0 && y == 1) ++r.fp;
    if (l == 0 && y == 0) ++r.tn;
    if (l == 1 && y == 0) ++r.fn;
  }
  r.n_targets = gold.size();
  r.n_positive = r.tp + r.fn;
  if (r.n_positive > 0) r.average_precision = average_precision(scores, gold);
  return r;
}

void write_report(const std::filesystem::path& path, const EvalReport& r) {
  KeyValues kv{{"accuracy", textio::format_double(r.accuracy)},
               {"average_precision",
                r.average_precision ? textio::format_double(*r.average_precision) : "NA"},
               {"n_targets", std::to_string(r.n_targets)},
               {"n_positive", std::to_string(r.n_positive)},
               {"tp", std::to_string(r.tp)},
               {"fp", std::to_string(r.fp)},
               {"tn", std::to_string(r.tn)},
               {"fn", std::to_string(r.fn)}};
  write_key_values(path, kv);
}

}  // namespace lscd
