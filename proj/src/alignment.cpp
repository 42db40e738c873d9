#include "lscd/alignment.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lscd/error.hpp"
#include "lscd/textio.hpp"

namespace lscd {

Matrix length_normalize(const Matrix& m, std::size_t* zero_rows) {
  Matrix out = m;
  std::size_t zeros = 0;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm > 0.0)
      out.row(i) /= norm;
    else
      ++zeros;
  }
  if (zero_rows) *zero_rows += zeros;
  return out;
}

Matrix mean_center(const Matrix& m) {
  if (m.rows() == 0) throw DataError("mean_center: empty matrix");
  const Eigen::RowVectorXd mean = m.colwise().mean();
  return m.rowwise() - mean;
}

SharedVocabMap intersect_vocab(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  if (a.vocab.empty() || b.vocab.empty()) throw DataError("intersect_vocab: empty vocabulary");
  struct Entry {
    const std::string* word;
    WordIndex ra;
    WordIndex rb;
    std::uint64_t joint;
  };
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < a.vocab.size(); ++i) {
    const auto ra = static_cast<WordIndex>(i);
    const WordIndex rb = b.vocab.find(a.vocab.word(ra));
    if (rb == Vocabulary::npos) continue;
    entries.push_back({&a.vocab.word(ra), ra, rb, a.vocab.count(ra) + b.vocab.count(rb)});
  }
  if (entries.empty()) throw DataError("no shared vocabulary");
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    return x.joint != y.joint ? x.joint > y.joint : *x.word < *y.word;
  });
  SharedVocabMap map;
  map.words.reserve(entries.size());
  map.rows_a.reserve(entries.size());
  map.rows_b.reserve(entries.size());
  for (const auto& e : entries) {
    map.words.push_back(*e.word);
    map.rows_a.push_back(e.ra);
    map.rows_b.push_back(e.rb);
  }
  return map;
}

OrthogonalMap orthogonal_procrustes(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DataError("orthogonal_procrustes: shape mismatch");
  if (a.rows() < 1 || a.cols() < 1) throw DataError("orthogonal_procrustes: empty input");
  if (!a.allFinite() || !b.allFinite())
    throw NumericError("orthogonal_procrustes: non-finite input");

  const Eigen::MatrixXd m = b.transpose() * a;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) throw NumericError("orthogonal_procrustes: SVD failed");
  OrthogonalMap out;
  out.w = svd.matrixU() * svd.matrixV().transpose();
  if (!out.w.allFinite()) throw NumericError("orthogonal_procrustes: SVD produced non-finite values");
  return out;
}

double procrustes_residual(const Matrix& a, const Matrix& b, const Matrix& w) {
  return (b * w - a).norm();
}

namespace {

Matrix gather_rows(const Matrix& m, const std::vector<WordIndex>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

Matrix preprocess(Matrix m, const AlignOptions& opts, std::size_t& zero_rows) {
  if (opts.normalize) m = length_normalize(m, &zero_rows);
  if (opts.center) m = mean_center(m);
  if (opts.renormalize) m = length_normalize(m, &zero_rows);
  return m;
}

}  // namespace

AlignedPair align(const EmbeddingMatrix& a, const EmbeddingMatrix& b, const AlignOptions& opts) {
  if (a.dim() != b.dim()) throw DataError("align: embedding dimensions differ");
  AlignedPair out;
  out.map = intersect_vocab(a, b);
  out.a = preprocess(gather_rows(a.word_vectors, out.map.rows_a), opts, out.zero_rows);
  Matrix pb = preprocess(gather_rows(b.word_vectors, out.map.rows_b), opts, out.zero_rows);

  const auto n = static_cast<Eigen::Index>(out.map.size());
  const Eigen::Index fit = opts.fit_top_n == 0 ? n : std::min<Eigen::Index>(n, static_cast<Eigen::Index>(opts.fit_top_n));
  if (fit == n)
    out.w = orthogonal_procrustes(out.a, pb);
  else
    out.w = orthogonal_procrustes(out.a.topRows(fit), pb.topRows(fit));
  out.b = pb * out.w.w;
  return out;
}

Matrix random_orthogonal(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

void save_matrix(const Matrix& m, const std::filesystem::path& path) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ' ';
      out += textio::format_double(m(i, j));
    }
    out += '\n';
  }
  textio::write_file(path, out);
}

Matrix load_matrix(const std::filesystem::path& path) {
  std::vector<std::vector<double>> rows;
  const std::string name = path.string();
  textio::for_each_line(path, [&](std::string_view line, std::size_t number) {
    if (line.empty()) return;
    std::vector<double> row;
    for (auto f : textio::split(line, ' ')) {
      if (f.empty()) continue;
      auto v = textio::parse_double(f);
      if (!v) throw ParseError(name, number, "bad value '" + std::string(f) + "'");
      row.push_back(*v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(name, number, "row length differs from first row");
    rows.push_back(std::move(row));
  });
  if (rows.empty()) throw ParseError(name, 1, "empty matrix file");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

EmbeddingMatrix aligned_side(const AlignedPair& pair, const EmbeddingMatrix& source, bool side_a) {
  const auto& rows = side_a ? pair.map.rows_a : pair.map.rows_b;
  std::vector<std::uint64_t> counts;
  counts.reserve(rows.size());
  for (WordIndex r : rows) counts.push_back(source.vocab.count(r));
  EmbeddingMatrix out;
  // Shared rows are a subset, so min_count and total still hold.
  out.vocab = Vocabulary(pair.map.words, std::move(counts), source.vocab.total_tokens(),
                         source.vocab.min_count());
  out.word_vectors = side_a ? pair.a : pair.b;
  return out;
}

}  // namespace lscd
