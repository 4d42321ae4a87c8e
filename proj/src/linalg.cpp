#include "hybridsl/linalg.hpp"

#include "hybridsl/format.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

namespace hybridsl {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> entries)
    : rows_(rows), cols_(cols) {
  for (const auto& t : entries) {
    if (t.row >= rows || t.col >= cols) throw std::out_of_range("sparse entry outside the matrix");
    if (!std::isfinite(t.value)) throw std::invalid_argument("non-finite sparse entry");
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (const auto& t : entries) {
    if (!entries_.empty() && entries_.back().row == t.row && entries_.back().col == t.col)
      entries_.back().value += t.value;
    else
      entries_.push_back(t);
  }
  row_begin_.assign(rows_ + 1, 0);
  for (const auto& t : entries_) ++row_begin_[t.row + 1];
  for (std::size_t r = 0; r < rows_; ++r) row_begin_[r + 1] += row_begin_[r];
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<Triplet> e(n);
  for (std::size_t i = 0; i < n; ++i) e[i] = {i, i, 1.0};
  return {n, n, std::move(e)};
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  for (const auto& t : row(r))
    if (t.col == c) return t.value;
  return 0.0;
}

std::span<const Triplet> SparseMatrix::row(std::size_t r) const {
  if (r >= rows_) throw std::out_of_range("row index out of range");
  return {entries_.data() + row_begin_[r], row_begin_[r + 1] - row_begin_[r]};
}

std::vector<double> SparseMatrix::multiply(std::span<const double> v) const {
  if (v.size() != cols_) throw std::invalid_argument("matvec dimension mismatch");
  std::vector<double> out(rows_, 0.0);
  for (const auto& t : entries_) out[t.row] += t.value * v[t.col];
  return out;
}

SparseMatrix SparseMatrix::operator+(const SparseMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw std::invalid_argument("matrix sum dimension mismatch");
  std::vector<Triplet> e = entries_;
  e.insert(e.end(), other.entries_.begin(), other.entries_.end());
  return {rows_, cols_, std::move(e)};
}

SparseMatrix SparseMatrix::scaled(double factor) const {
  std::vector<Triplet> e = entries_;
  for (auto& t : e) t.value *= factor;
  return {rows_, cols_, std::move(e)};
}

std::vector<double> matvec(const SparseMatrix& m, std::span<const double> v) { return m.multiply(v); }

double sup_norm(std::span<const double> v) {
  double r = 0.0;
  for (double x : v) r = std::max(r, std::abs(x));
  return r;
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("size mismatch");
  double r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
  return r;
}

namespace {

double residual(const SparseMatrix& m, std::span<const double> w, std::span<const double> rhs,
                std::vector<double>& r) {
  r = m.multiply(w);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
  return sup_norm(r);
}

}  // namespace

std::vector<double> solve(const SparseMatrix& m, std::span<const double> rhs, double tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("solve needs a square matrix");
  if (rhs.size() != m.rows()) throw std::invalid_argument("right-hand side dimension mismatch");
  const auto n = static_cast<Eigen::Index>(m.rows());

  // Structurally empty rows are singular whatever the factorization says.
  std::vector<std::size_t> empty;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    if (std::none_of(row.begin(), row.end(), [](const Triplet& t) { return t.value != 0.0; }))
      empty.push_back(r + 1);
  }
  if (!empty.empty()) throw SingularSystemError("matrix has empty rows", empty);

  Eigen::SparseMatrix<double> a(n, n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(m.nonzeros());
  for (const auto& t : m.entries())
    trips.emplace_back(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col), t.value);
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw SingularSystemError("sparse LU failed: " + lu.lastErrorMessage(), {});
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw SingularSystemError("sparse LU solve failed", {});

  std::vector<double> w(x.data(), x.data() + n);
  std::vector<double> r;
  double res = residual(m, w, rhs, r);
  // Iterative refinement absorbs the rounding of the factorization.
  for (int pass = 0; pass < 5 && res > tol; ++pass) {
    Eigen::Map<const Eigen::VectorXd> rv(r.data(), n);
    const Eigen::VectorXd dx = lu.solve(rv);
    for (Eigen::Index i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] += dx[i];
    res = residual(m, w, rhs, r);
  }
  if (!(res <= tol))
    throw std::runtime_error("linear solve residual " + fmt_double(res) + " above tolerance " + fmt_double(tol));
  return w;
}

void write_coordinate(std::ostream& out, const SparseMatrix& m) {
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonzeros() << '\n';
  for (const auto& t : m.entries()) out << t.row + 1 << ' ' << t.col + 1 << ' ' << fmt_double(t.value) << '\n';
}

SparseMatrix read_coordinate(std::istream& in) {
  std::size_t rows = 0, cols = 0, nnz = 0;
  if (!(in >> rows >> cols >> nnz)) throw std::runtime_error("bad coordinate header");
  std::vector<Triplet> e;
  e.reserve(nnz);
  for (std::size_t k = 0; k < nnz; ++k) {
    Triplet t;
    if (!(in >> t.row >> t.col >> t.value) || t.row == 0 || t.col == 0)
      throw std::runtime_error("bad coordinate entry");
    --t.row;
    --t.col;
    e.push_back(t);
  }
  return {rows, cols, std::move(e)};
}

}  // namespace hybridsl
