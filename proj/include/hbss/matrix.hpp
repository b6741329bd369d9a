#pragma once

#include <utility>
#include <vector>

#include "hbss/coefficients.hpp"

namespace hbss {

using Vector = std::vector<Scalar>;
using DenseMatrix = std::vector<Vector>;

/// Sparse matrix over a coefficient ring. Rows are stored as column-sorted
/// (column, value) lists; stored values are always normalized and nonzero.
class ExactMatrix {
 public:
  using Entry = std::pair<int, Scalar>;
  using Row = std::vector<Entry>;

  ExactMatrix(Coefficients ctx, int rows, int cols);

  static ExactMatrix identity(const Coefficients& ctx, int n);
  static ExactMatrix from_dense(const Coefficients& ctx, const DenseMatrix& dense, int cols = -1);
  static ExactMatrix from_columns(const Coefficients& ctx, int rows, const std::vector<Vector>& columns);
  /// Block matrix [a | b].
  static ExactMatrix hconcat(const ExactMatrix& a, const ExactMatrix& b);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const Coefficients& coefficients() const { return ctx_; }
  const Row& row(int i) const { return data_[static_cast<std::size_t>(i)]; }

  Scalar at(int i, int j) const;
  void set(int i, int j, const Scalar& value);
  void add_to(int i, int j, const Scalar& value);
  /// Adds scale * block with its top-left corner at (row0, col0).
  void add_block(int row0, int col0, const ExactMatrix& block, const Scalar& scale = Scalar(1));

  Vector column(int j) const;
  std::vector<Vector> columns() const;
  DenseMatrix to_dense() const;

  Vector apply(const Vector& x) const;
  ExactMatrix operator*(const ExactMatrix& other) const;
  ExactMatrix operator+(const ExactMatrix& other) const;
  ExactMatrix transpose() const;
  ExactMatrix scaled(const Scalar& c) const;

  bool is_zero() const;
  std::size_t nonzeros() const;
  bool operator==(const ExactMatrix& other) const;
  bool operator!=(const ExactMatrix& other) const { return !(*this == other); }

 private:
  Coefficients ctx_;
  int rows_;
  int cols_;
  std::vector<Row> data_;
};

Vector zero_vector(int n);
bool is_zero_vector(const Vector& v);
Vector unit_vector(int n, int i);

}  // namespace hbss
