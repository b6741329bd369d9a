#include "hbss/matrix.hpp"

#include <algorithm>
#include <stdexcept>

namespace hbss {

Vector zero_vector(int n) { return Vector(static_cast<std::size_t>(n), Scalar(0)); }

bool is_zero_vector(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](const Scalar& x) { return x == 0; });
}

Vector unit_vector(int n, int i) {
  Vector v = zero_vector(n);
  v[static_cast<std::size_t>(i)] = 1;
  return v;
}

ExactMatrix::ExactMatrix(Coefficients ctx, int rows, int cols)
    : ctx_(std::move(ctx)), rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows)) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
}

ExactMatrix ExactMatrix::identity(const Coefficients& ctx, int n) {
  ExactMatrix m(ctx, n, n);
  for (int i = 0; i < n; ++i) m.data_[static_cast<std::size_t>(i)].emplace_back(i, Scalar(1));
  return m;
}

ExactMatrix ExactMatrix::from_dense(const Coefficients& ctx, const DenseMatrix& dense, int cols) {
  int c = cols >= 0 ? cols : (dense.empty() ? 0 : static_cast<int>(dense.front().size()));
  ExactMatrix m(ctx, static_cast<int>(dense.size()), c);
  for (int i = 0; i < m.rows_; ++i) {
    const Vector& r = dense[static_cast<std::size_t>(i)];
    if (static_cast<int>(r.size()) != c) throw std::invalid_argument("ragged dense matrix");
    for (int j = 0; j < c; ++j) {
      Scalar v = ctx.normalize(r[static_cast<std::size_t>(j)]);
      if (v != 0) m.data_[static_cast<std::size_t>(i)].emplace_back(j, std::move(v));
    }
  }
  return m;
}

ExactMatrix ExactMatrix::from_columns(const Coefficients& ctx, int rows, const std::vector<Vector>& columns) {
  ExactMatrix m(ctx, rows, static_cast<int>(columns.size()));
  for (int j = 0; j < m.cols_; ++j) {
    const Vector& c = columns[static_cast<std::size_t>(j)];
    if (static_cast<int>(c.size()) != rows) throw std::invalid_argument("column length mismatch");
    for (int i = 0; i < rows; ++i) {
      Scalar v = ctx.normalize(c[static_cast<std::size_t>(i)]);
      if (v != 0) m.data_[static_cast<std::size_t>(i)].emplace_back(j, std::move(v));
    }
  }
  return m;
}

ExactMatrix ExactMatrix::hconcat(const ExactMatrix& a, const ExactMatrix& b) {
  if (a.rows_ != b.rows_) throw std::invalid_argument("hconcat row mismatch");
  ExactMatrix m(a.ctx_, a.rows_, a.cols_ + b.cols_);
  for (int i = 0; i < a.rows_; ++i) {
    auto& out = m.data_[static_cast<std::size_t>(i)];
    out = a.data_[static_cast<std::size_t>(i)];
    for (const auto& [j, v] : b.data_[static_cast<std::size_t>(i)]) out.emplace_back(j + a.cols_, v);
  }
  return m;
}

Scalar ExactMatrix::at(int i, int j) const {
  const Row& r = data_.at(static_cast<std::size_t>(i));
  auto it = std::lower_bound(r.begin(), r.end(), j, [](const Entry& e, int c) { return e.first < c; });
  if (it != r.end() && it->first == j) return it->second;
  return Scalar(0);
}

void ExactMatrix::set(int i, int j, const Scalar& value) {
  if (j < 0 || j >= cols_) throw std::out_of_range("matrix column out of range");
  Row& r = data_.at(static_cast<std::size_t>(i));
  Scalar v = ctx_.normalize(value);
  auto it = std::lower_bound(r.begin(), r.end(), j, [](const Entry& e, int c) { return e.first < c; });
  if (it != r.end() && it->first == j) {
    if (v == 0)
      r.erase(it);
    else
      it->second = std::move(v);
  } else if (v != 0) {
    r.insert(it, Entry(j, std::move(v)));
  }
}

void ExactMatrix::add_to(int i, int j, const Scalar& value) { set(i, j, at(i, j) + value); }

void ExactMatrix::add_block(int row0, int col0, const ExactMatrix& block, const Scalar& scale) {
  if (row0 < 0 || col0 < 0 || row0 + block.rows() > rows_ || col0 + block.cols() > cols_)
    throw std::out_of_range("add_block: block does not fit");
  for (int i = 0; i < block.rows(); ++i)
    for (const auto& [j, v] : block.row(i)) add_to(row0 + i, col0 + j, v * scale);
}

Vector ExactMatrix::column(int j) const {
  Vector c = zero_vector(rows_);
  for (int i = 0; i < rows_; ++i) c[static_cast<std::size_t>(i)] = at(i, j);
  return c;
}

std::vector<Vector> ExactMatrix::columns() const {
  std::vector<Vector> out(static_cast<std::size_t>(cols_), zero_vector(rows_));
  for (int i = 0; i < rows_; ++i)
    for (const auto& [j, v] : data_[static_cast<std::size_t>(i)])
      out[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = v;
  return out;
}

DenseMatrix ExactMatrix::to_dense() const {
  DenseMatrix d(static_cast<std::size_t>(rows_), zero_vector(cols_));
  for (int i = 0; i < rows_; ++i)
    for (const auto& [j, v] : data_[static_cast<std::size_t>(i)])
      d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
  return d;
}

Vector ExactMatrix::apply(const Vector& x) const {
  if (static_cast<int>(x.size()) != cols_) throw std::invalid_argument("apply: vector length mismatch");
  Vector y = zero_vector(rows_);
  for (int i = 0; i < rows_; ++i) {
    Scalar acc = 0;
    for (const auto& [j, v] : data_[static_cast<std::size_t>(i)]) {
      const Scalar& xj = x[static_cast<std::size_t>(j)];
      if (xj != 0) acc += v * xj;
    }
    y[static_cast<std::size_t>(i)] = ctx_.normalize(acc);
  }
  return y;
}

ExactMatrix ExactMatrix::operator*(const ExactMatrix& other) const {
  if (cols_ != other.rows_) throw std::invalid_argument("matrix product dimension mismatch");
  ExactMatrix m(ctx_, rows_, other.cols_);
  Vector acc = zero_vector(other.cols_);
  std::vector<char> touched(static_cast<std::size_t>(other.cols_), 0);
  std::vector<int> cols;
  for (int i = 0; i < rows_; ++i) {
    cols.clear();
    for (const auto& [k, a] : data_[static_cast<std::size_t>(i)]) {
      for (const auto& [j, b] : other.data_[static_cast<std::size_t>(k)]) {
        auto uj = static_cast<std::size_t>(j);
        if (!touched[uj]) {
          touched[uj] = 1;
          cols.push_back(j);
          acc[uj] = 0;
        }
        acc[uj] += a * b;
      }
    }
    std::sort(cols.begin(), cols.end());
    Row& out = m.data_[static_cast<std::size_t>(i)];
    for (int j : cols) {
      auto uj = static_cast<std::size_t>(j);
      touched[uj] = 0;
      Scalar v = ctx_.normalize(acc[uj]);
      if (v != 0) out.emplace_back(j, std::move(v));
    }
  }
  return m;
}

ExactMatrix ExactMatrix::operator+(const ExactMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw std::invalid_argument("matrix sum dimension mismatch");
  ExactMatrix m = *this;
  for (int i = 0; i < rows_; ++i)
    for (const auto& [j, v] : other.data_[static_cast<std::size_t>(i)]) m.add_to(i, j, v);
  return m;
}

ExactMatrix ExactMatrix::transpose() const {
  ExactMatrix t(ctx_, cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (const auto& [j, v] : data_[static_cast<std::size_t>(i)])
      t.data_[static_cast<std::size_t>(j)].emplace_back(i, v);
  return t;
}

ExactMatrix ExactMatrix::scaled(const Scalar& c) const {
  ExactMatrix m(ctx_, rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (const auto& [j, v] : data_[static_cast<std::size_t>(i)]) {
      Scalar w = ctx_.normalize(v * c);
      if (w != 0) m.data_[static_cast<std::size_t>(i)].emplace_back(j, std::move(w));
    }
  return m;
}

bool ExactMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Row& r) { return r.empty(); });
}

std::size_t ExactMatrix::nonzeros() const {
  std::size_t n = 0;
  for (const Row& r : data_) n += r.size();
  return n;
}

bool ExactMatrix::operator==(const ExactMatrix& other) const {
  return ctx_ == other.ctx_ && rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
}

}  // namespace hbss
