#include "lrq/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lrq {

bool all_finite(const Matrix& m) { return m.allFinite(); }

double entrywise_l1(const Matrix& m) { return m.cwiseAbs().sum(); }

SparseCoo::SparseCoo(Index rows, Index cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("SparseCoo: negative dimensions");
}

SparseCoo SparseCoo::from_dense(const Matrix& m) {
  SparseCoo out(m.rows(), m.cols());
  // row-major scan keeps the entries sorted by construction
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) out.entries_.push_back({i, j, m(i, j)});
  return out;
}

SparseCoo SparseCoo::from_entries(Index rows, Index cols, std::vector<SparseEntry> entries) {
  SparseCoo out(rows, cols);
  std::sort(entries.begin(), entries.end(), [](const SparseEntry& a, const SparseEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const SparseEntry& e = entries[k];
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
      throw std::invalid_argument("SparseCoo: entry (" + std::to_string(e.row) + ", " +
                                  std::to_string(e.col) + ") out of range");
    if (e.value == 0.0 || !std::isfinite(e.value))
      throw std::invalid_argument("SparseCoo: entry (" + std::to_string(e.row) + ", " +
                                  std::to_string(e.col) + ") must be nonzero and finite");
    if (k > 0 && entries[k - 1].row == e.row && entries[k - 1].col == e.col)
      throw std::invalid_argument("SparseCoo: duplicate entry (" + std::to_string(e.row) +
                                  ", " + std::to_string(e.col) + ")");
  }
  out.entries_ = std::move(entries);
  return out;
}

Matrix SparseCoo::to_dense() const {
  Matrix m = Matrix::Zero(rows_, cols_);
  for (const SparseEntry& e : entries_) m(e.row, e.col) = e.value;
  return m;
}

std::span<const SparseEntry> SparseCoo::row_span(Index r) const {
  const auto lo = std::lower_bound(
      entries_.begin(), entries_.end(), r,
      [](const SparseEntry& e, Index row) { return e.row < row; });
  const auto hi = std::upper_bound(
      lo, entries_.end(), r, [](Index row, const SparseEntry& e) { return row < e.row; });
  return {entries_.data() + (lo - entries_.begin()), static_cast<std::size_t>(hi - lo)};
}

double SparseCoo::entrywise_l1() const {
  double sum = 0.0;
  for (const SparseEntry& e : entries_) sum += std::abs(e.value);
  return sum;
}

}  // namespace lrq
