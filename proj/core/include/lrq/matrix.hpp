#pragma once

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <vector>

namespace lrq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// A numerical routine could not complete (e.g. an SVD failed to converge).
/// Kept distinct from usage errors so callers can map exit codes.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or unreadable data file; messages carry "path:line:" context
/// where a line is known.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool all_finite(const Matrix& m);

/// l1 norm of the matrix seen as a long vector (sum of absolute entries).
double entrywise_l1(const Matrix& m);

struct SparseEntry {
  Index row = 0;
  Index col = 0;
  double value = 0.0;
};

/// Coordinate-list sparse matrix. Entries are sorted by (row, col), unique,
/// and nonzero.
class SparseCoo {
 public:
  SparseCoo() = default;
  SparseCoo(Index rows, Index cols);

  /// Collects the nonzero entries of a dense matrix. Only entries that are
  /// exactly zero are dropped; there is no epsilon pruning.
  static SparseCoo from_dense(const Matrix& m);

  /// Takes raw entries, sorts them, and validates index ranges, uniqueness,
  /// and nonzero finite values. Throws std::invalid_argument on violations.
  static SparseCoo from_entries(Index rows, Index cols, std::vector<SparseEntry> entries);

  Matrix to_dense() const;

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(entries_.size()); }
  const std::vector<SparseEntry>& entries() const { return entries_; }

  /// Entries of row r; a contiguous run since entries are sorted.
  std::span<const SparseEntry> row_span(Index r) const;

  double entrywise_l1() const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<SparseEntry> entries_;
};

}  // namespace lrq
