#include "hbss/smith.hpp"

#include <utility>

namespace hbss {
namespace {

using std::size_t;

inline size_t u(int i) { return static_cast<size_t>(i); }

}  // namespace

SmithForm smith_normal_form(const ExactMatrix& m) {
  const Coefficients& ctx = m.coefficients();
  const int rows = m.rows();
  const int cols = m.cols();
  DenseMatrix a = m.to_dense();
  DenseMatrix left = ExactMatrix::identity(ctx, rows).to_dense();
  DenseMatrix left_inv = left;
  DenseMatrix right = ExactMatrix::identity(ctx, cols).to_dense();
  std::vector<int> exponents;

  const int steps = rows < cols ? rows : cols;
  int t = 0;
  for (; t < steps; ++t) {
    int pi = -1, pj = -1;
    int best = Coefficients::kInfiniteValuation;
    for (int i = t; i < rows && best > 0; ++i) {
      for (int j = t; j < cols; ++j) {
        const Scalar& x = a[u(i)][u(j)];
        if (x == 0) continue;
        int v = ctx.valuation(x);
        if (v < best) {
          best = v;
          pi = i;
          pj = j;
          if (v == 0) break;
        }
      }
    }
    if (pi < 0) break;

    if (pi != t) {
      std::swap(a[u(pi)], a[u(t)]);
      std::swap(left[u(pi)], left[u(t)]);
      for (int r = 0; r < rows; ++r) std::swap(left_inv[u(r)][u(pi)], left_inv[u(r)][u(t)]);
    }
    if (pj != t) {
      for (int r = 0; r < rows; ++r) std::swap(a[u(r)][u(pj)], a[u(r)][u(t)]);
      for (int r = 0; r < cols; ++r) std::swap(right[u(r)][u(pj)], right[u(r)][u(t)]);
    }

    // Pivot becomes exactly p^best.
    Scalar unit = ctx.unit_part(a[u(t)][u(t)]);
    if (unit != 1) {
      Scalar inv = ctx.inverse(unit);
      for (int j = t; j < cols; ++j)
        if (a[u(t)][u(j)] != 0) a[u(t)][u(j)] = ctx.normalize(a[u(t)][u(j)] * inv);
      for (int j = 0; j < rows; ++j)
        if (left[u(t)][u(j)] != 0) left[u(t)][u(j)] = ctx.normalize(left[u(t)][u(j)] * inv);
      for (int r = 0; r < rows; ++r)
        if (left_inv[u(r)][u(t)] != 0) left_inv[u(r)][u(t)] = ctx.normalize(left_inv[u(r)][u(t)] * unit);
    }
    const Scalar pivot = a[u(t)][u(t)];

    for (int i = t + 1; i < rows; ++i) {
      if (a[u(i)][u(t)] == 0) continue;
      Scalar f = ctx.divide(a[u(i)][u(t)], pivot);
      for (int j = t; j < cols; ++j)
        if (a[u(t)][u(j)] != 0) a[u(i)][u(j)] = ctx.normalize(a[u(i)][u(j)] - f * a[u(t)][u(j)]);
      for (int j = 0; j < rows; ++j)
        if (left[u(t)][u(j)] != 0) left[u(i)][u(j)] = ctx.normalize(left[u(i)][u(j)] - f * left[u(t)][u(j)]);
      for (int r = 0; r < rows; ++r)
        if (left_inv[u(r)][u(i)] != 0)
          left_inv[u(r)][u(t)] = ctx.normalize(left_inv[u(r)][u(t)] + f * left_inv[u(r)][u(i)]);
    }
    for (int j = t + 1; j < cols; ++j) {
      if (a[u(t)][u(j)] == 0) continue;
      Scalar f = ctx.divide(a[u(t)][u(j)], pivot);
      a[u(t)][u(j)] = 0;
      for (int r = 0; r < cols; ++r)
        if (right[u(r)][u(t)] != 0) right[u(r)][u(j)] = ctx.normalize(right[u(r)][u(j)] - f * right[u(r)][u(t)]);
    }
    exponents.push_back(best);
  }

  SmithForm out{ExactMatrix(ctx, rows, cols), ExactMatrix::from_dense(ctx, left, rows),
                ExactMatrix::from_dense(ctx, left_inv, rows), ExactMatrix::from_dense(ctx, right, cols),
                std::move(exponents), t};
  for (int i = 0; i < out.rank; ++i) out.diagonal.set(i, i, ctx.prime_power(out.exponents[u(i)]));
  return out;
}

KernelImage kernel_image(const ExactMatrix& m) {
  const Coefficients& ctx = m.coefficients();
  SmithForm snf = smith_normal_form(m);
  KernelImage out;
  for (int i = 0; i < snf.rank; ++i) {
    Vector g = snf.left_inverse.column(i);
    Scalar d = ctx.prime_power(snf.exponents[u(i)]);
    for (auto& x : g) x = ctx.normalize(x * d);
    out.image.push_back(std::move(g));
  }
  for (int j = 0; j < m.cols(); ++j) {
    if (j >= snf.rank) {
      out.kernel.push_back(snf.right.column(j));
      continue;
    }
    // Over Z/p^k, p^(k-e) annihilates p^e.
    int e = snf.exponents[u(j)];
    if (!ctx.is_finite() || e == 0) continue;
    Scalar c = ctx.prime_power(ctx.exponent() - e);
    Vector g = snf.right.column(j);
    for (auto& x : g) x = ctx.normalize(x * c);
    out.kernel.push_back(std::move(g));
  }
  return out;
}

CokernelShape cokernel_shape(const ExactMatrix& m) {
  SmithForm snf = smith_normal_form(m);
  CokernelShape out;
  out.free_rank = m.rows() - snf.rank;
  for (int e : snf.exponents)
    if (e > 0) out.torsion.push_back(e);
  return out;
}

}  // namespace hbss
