#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

namespace hybridsl {

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

/// Row-sorted coordinate-format sparse matrix without duplicate (row, col) pairs.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  /// Duplicate (row, col) entries are summed; explicit zeros are kept.
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);

  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<Triplet>& entries() const { return entries_; }
  std::size_t nonzeros() const { return entries_.size(); }

  /// Entry (row, col), 0 when absent.
  double at(std::size_t row, std::size_t col) const;
  /// Entries of one row, in column order.
  std::span<const Triplet> row(std::size_t r) const;

  std::vector<double> multiply(std::span<const double> v) const;

  SparseMatrix operator+(const SparseMatrix& other) const;
  SparseMatrix scaled(double factor) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Triplet> entries_;
  std::vector<std::size_t> row_begin_;
};

std::vector<double> matvec(const SparseMatrix& m, std::span<const double> v);

class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& what, std::vector<std::size_t> rows)
      : std::runtime_error(what), rows_(std::move(rows)) {}
  /// 1-based rows implicated in the singularity, when known.
  const std::vector<std::size_t>& rows() const { return rows_; }

 private:
  std::vector<std::size_t> rows_;
};

/// Solves M w = rhs with ||M w - rhs||_inf <= tol, checked by an explicit product.
/// Throws SingularSystemError when M is singular, std::runtime_error when the
/// residual bound cannot be met.
std::vector<double> solve(const SparseMatrix& m, std::span<const double> rhs, double tol);

double sup_norm(std::span<const double> v);
double sup_distance(std::span<const double> a, std::span<const double> b);

/// Coordinate text: a header line "rows cols nnz", then "row col value" with 1-based indices.
void write_coordinate(std::ostream& out, const SparseMatrix& m);
SparseMatrix read_coordinate(std::istream& in);

}  // namespace hybridsl
