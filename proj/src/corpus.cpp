#include "lscd/corpus.hpp"

#include <zlib.h>

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "lscd/error.hpp"

namespace lscd {

namespace {

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= n) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // overlong encodings, surrogates, out of range
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000) ||
        cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
      return false;
    i += extra + 1;
  }
  return true;
}

bool has_gzip_magic(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  unsigned char magic[2] = {0, 0};
  in.read(reinterpret_cast<char*>(magic), 2);
  return in.gcount() == 2 && magic[0] == 0x1f && magic[1] == 0x8b;
}

void tokenize(std::string_view line, std::vector<std::string>& tokens) {
  tokens.clear();
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) tokens.emplace_back(line.substr(start, i - start));
  }
}

}  // namespace

struct CorpusReader::Impl {
  std::string path;
  gzFile file = nullptr;  // zlib reads plain files transparently too
  std::size_t line = 0;
  std::string buffer;

  ~Impl() {
    if (file) gzclose(file);
  }

  bool read_line(std::string& out) {
    out.clear();
    char chunk[8192];
    bool any = false;
    while (gzgets(file, chunk, sizeof(chunk)) != nullptr) {
      any = true;
      out.append(chunk);
      if (!out.empty() && out.back() == '\n') break;
    }
    if (!any) {
      int err = 0;
      const char* msg = gzerror(file, &err);
      if (err != Z_OK && err != Z_BUF_ERROR) throw IoError(path + ": " + msg);
      return false;
    }
    while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
    return true;
  }
};

CorpusReader::CorpusReader(const std::filesystem::path& path, CorpusFormat format)
    : impl_(std::make_unique<Impl>()) {
  impl_->path = path.string();
  if (format == CorpusFormat::Gzip && !has_gzip_magic(path))
    throw ParseError(impl_->path, 1, "not a gzip file");
  impl_->file = gzopen(impl_->path.c_str(), "rb");
  if (!impl_->file) throw IoError("cannot open " + impl_->path);
  gzbuffer(impl_->file, 1 << 16);
}

CorpusReader::~CorpusReader() = default;
CorpusReader::CorpusReader(CorpusReader&&) noexcept = default;
CorpusReader& CorpusReader::operator=(CorpusReader&&) noexcept = default;

bool CorpusReader::next(Sentence& out) {
  while (impl_->read_line(impl_->buffer)) {
    ++impl_->line;
    if (!valid_utf8(impl_->buffer)) throw ParseError(impl_->path, impl_->line, "invalid UTF-8");
    tokenize(impl_->buffer, out.tokens);
    if (!out.tokens.empty()) return true;
  }
  return false;
}

std::size_t CorpusReader::line_number() const { return impl_->line; }

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  CorpusReader reader(path, format);
  Corpus corpus;
  Sentence s;
  while (reader.next(s)) corpus.push_back(s);
  return corpus;
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& s : corpus) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (i) out << ' ';
      out << s.tokens[i];
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts,
                       std::uint64_t total_tokens, std::uint64_t min_count)
    : words_(std::move(words)),
      counts_(std::move(counts)),
      total_tokens_(total_tokens),
      min_count_(min_count) {
  if (words_.size() != counts_.size()) throw DataError("vocabulary: words/counts size mismatch");
  std::uint64_t sum = 0;
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (counts_[i] < min_count_) throw DataError("vocabulary: '" + words_[i] + "' below min_count");
    if (!index_.emplace(words_[i], static_cast<WordIndex>(i)).second)
      throw DataError("vocabulary: duplicate word '" + words_[i] + "'");
    sum += counts_[i];
  }
  if (sum > total_tokens_) throw DataError("vocabulary: total_tokens smaller than sum of counts");
}

WordIndex Vocabulary::find(std::string_view w) const {
  auto it = index_.find(std::string(w));
  return it == index_.end() ? npos : it->second;
}

std::unordered_map<std::string, std::uint64_t> count_tokens(std::span<const Sentence> corpus,
                                                            std::uint64_t* total) {
  std::unordered_map<std::string, std::uint64_t> counts;
  std::uint64_t n = 0;
  for (const auto& s : corpus) {
    for (const auto& tok : s.tokens) {
      ++counts[tok];
      ++n;
    }
  }
  if (total) *total = n;
  return counts;
}

Vocabulary build_vocabulary(std::span<const Sentence> corpus, std::uint64_t min_count) {
  if (min_count < 1) throw DataError("min_count must be >= 1");
  std::uint64_t total = 0;
  auto counts = count_tokens(corpus, &total);
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [w, c] : counts)
    if (c >= min_count) kept.emplace_back(w, c);
  if (kept.empty()) throw DataError("empty vocabulary");
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> words;
  std::vector<std::uint64_t> cs;
  words.reserve(kept.size());
  cs.reserve(kept.size());
  for (auto& [w, c] : kept) {
    words.push_back(std::move(w));
    cs.push_back(c);
  }
  return Vocabulary(std::move(words), std::move(cs), total, min_count);
}

double subsample_keep_probability(double f, double t) {
  if (!(f > 0.0)) throw std::domain_error("subsampling: relative frequency must be > 0");
  if (!(t > 0.0)) throw std::domain_error("subsampling: threshold must be > 0");
  return std::min(1.0, std::sqrt(t / f));
}

std::vector<WordIndex> encode(const Sentence& sentence, const Vocabulary& vocab) {
  std::vector<WordIndex> ids;
  ids.reserve(sentence.tokens.size());
  for (const auto& tok : sentence.tokens) {
    WordIndex id = vocab.find(tok);
    if (id != Vocabulary::npos) ids.push_back(id);
  }
  return ids;
}

std::vector<double> keep_probabilities(const Vocabulary& vocab, double t) {
  std::vector<double> keep(vocab.size(), 1.0);
  const double total = static_cast<double>(vocab.total_tokens());
  for (std::size_t i = 0; i < vocab.size(); ++i)
    keep[i] = subsample_keep_probability(static_cast<double>(vocab.count(i)) / total, t);
  return keep;
}

std::uint64_t CorpusStats::count1(const std::string& w) const {
  auto it = counts1.find(w);
  return it == counts1.end() ? 0 : it->second;
}

std::uint64_t CorpusStats::count2(const std::string& w) const {
  auto it = counts2.find(w);
  return it == counts2.end() ? 0 : it->second;
}

CorpusStats corpus_stats(std::span<const Sentence> c1, std::span<const Sentence> c2) {
  CorpusStats stats;
  stats.counts1 = count_tokens(c1, &stats.size1);
  stats.counts2 = count_tokens(c2, &stats.size2);
  if (stats.size1 == 0 || stats.size2 == 0) throw DataError("corpus_stats: empty corpus");
  return stats;
}

}  // namespace lscd
