#include "hbss/span.hpp"

#include <algorithm>
#include <utility>

#include "hbss/errors.hpp"
#include "hbss/smith.hpp"

namespace hbss {
namespace {

inline std::size_t u(int i) { return static_cast<std::size_t>(i); }

Vector scaled(const Coefficients& ctx, Vector v, const Scalar& c) {
  for (auto& x : v) x = ctx.normalize(x * c);
  return v;
}

}  // namespace

int ModuleShape::torsion_length() const {
  int n = 0;
  for (int e : torsion) n += e;
  return n;
}

ModuleShape ModuleShape::as_p_local(const Coefficients& ground) const {
  if (ground.is_p_local()) return *this;
  ModuleShape out;
  out.torsion = torsion;
  out.torsion.insert(out.torsion.end(), u(free_rank), ground.exponent());
  std::sort(out.torsion.begin(), out.torsion.end());
  return out;
}

std::string ModuleShape::describe(const Coefficients& ground) const {
  if (is_zero()) return "0";
  std::string out;
  if (free_rank > 0) {
    out = ground.describe();
    if (free_rank > 1) out += "^" + std::to_string(free_rank);
  }
  std::size_t i = 0;
  while (i < torsion.size()) {
    std::size_t j = i;
    while (j < torsion.size() && torsion[j] == torsion[i]) ++j;
    mpz_class order;
    mpz_ui_pow_ui(order.get_mpz_t(), static_cast<unsigned long>(ground.prime()),
                  static_cast<unsigned long>(torsion[i]));
    if (!out.empty()) out += " + ";
    out += "Z/" + order.get_str();
    if (j - i > 1) out += "^" + std::to_string(j - i);
    i = j;
  }
  return out;
}

ModuleShape ModuleShape::operator+(const ModuleShape& other) const {
  ModuleShape out{free_rank + other.free_rank, torsion};
  out.torsion.insert(out.torsion.end(), other.torsion.begin(), other.torsion.end());
  std::sort(out.torsion.begin(), out.torsion.end());
  return out;
}

Span::Span(Coefficients ctx, int ambient_dim) : ctx_(std::move(ctx)), dim_(ambient_dim) {}

Span Span::whole(const Coefficients& ctx, int ambient_dim) {
  Span s(ctx, ambient_dim);
  for (int i = 0; i < ambient_dim; ++i) {
    s.gens_.push_back(unit_vector(ambient_dim, i));
    s.exps_.push_back(0);
  }
  s.left_ = ExactMatrix::identity(ctx, ambient_dim);
  return s;
}

Span Span::from_vectors(const Coefficients& ctx, int ambient_dim, const std::vector<Vector>& vectors) {
  std::vector<Vector> cols;
  for (const auto& v : vectors) {
    if (static_cast<int>(v.size()) != ambient_dim) throw std::invalid_argument("span vector length mismatch");
    Vector w(v.size());
    bool nonzero = false;
    for (std::size_t i = 0; i < v.size(); ++i) {
      w[i] = ctx.normalize(v[i]);
      nonzero = nonzero || w[i] != 0;
    }
    if (nonzero) cols.push_back(std::move(w));
  }
  Span s(ctx, ambient_dim);
  if (cols.empty()) return s;
  SmithForm snf = smith_normal_form(ExactMatrix::from_columns(ctx, ambient_dim, cols));
  for (int i = 0; i < snf.rank; ++i) {
    s.gens_.push_back(scaled(ctx, snf.left_inverse.column(i), ctx.prime_power(snf.exponents[u(i)])));
    s.exps_.push_back(snf.exponents[u(i)]);
  }
  s.left_ = std::move(snf.left);
  return s;
}

Span Span::from_matrix_columns(const ExactMatrix& m) {
  return from_vectors(m.coefficients(), m.rows(), m.columns());
}

std::optional<Vector> Span::coordinates(const Vector& x) const {
  if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("coordinates: vector length mismatch");
  if (gens_.empty()) {
    for (const auto& v : x)
      if (ctx_.normalize(v) != 0) return std::nullopt;
    return Vector{};
  }
  Vector y = left_->apply(x);
  const int r = size();
  for (int i = r; i < dim_; ++i)
    if (y[u(i)] != 0) return std::nullopt;
  Vector c(u(r));
  for (int i = 0; i < r; ++i) {
    if (ctx_.valuation(y[u(i)]) < exps_[u(i)]) return std::nullopt;
    c[u(i)] = ctx_.divide(y[u(i)], ctx_.prime_power(exps_[u(i)]));
  }
  return c;
}

bool Span::contains(const Span& other) const {
  return std::all_of(other.gens_.begin(), other.gens_.end(), [&](const Vector& g) { return contains(g); });
}

Span Span::operator+(const Span& other) const {
  if (other.dim_ != dim_) throw std::invalid_argument("span sum: ambient mismatch");
  if (other.is_zero()) return *this;
  if (is_zero()) return other;
  std::vector<Vector> all = gens_;
  all.insert(all.end(), other.gens_.begin(), other.gens_.end());
  return from_vectors(ctx_, dim_, all);
}

ExactMatrix Span::generator_matrix() const { return ExactMatrix::from_columns(ctx_, dim_, gens_); }

Span Span::intersect(const Span& other) const {
  if (other.dim_ != dim_) throw std::invalid_argument("span intersection: ambient mismatch");
  if (is_zero() || other.is_zero()) return Span(ctx_, dim_);
  ExactMatrix a = generator_matrix();
  ExactMatrix b = other.generator_matrix().scaled(Scalar(-1));
  KernelImage ki = kernel_image(ExactMatrix::hconcat(a, b));
  std::vector<Vector> out;
  const int r = size();
  for (const auto& k : ki.kernel) {
    Vector coeff(k.begin(), k.begin() + r);
    out.push_back(a.apply(coeff));
  }
  return from_vectors(ctx_, dim_, out);
}

Span Span::image(const ExactMatrix& m) const {
  if (m.cols() != dim_) throw std::invalid_argument("span image: dimension mismatch");
  std::vector<Vector> out;
  out.reserve(gens_.size());
  for (const auto& g : gens_) out.push_back(m.apply(g));
  return from_vectors(ctx_, m.rows(), out);
}

Span Span::preimage(const ExactMatrix& m, const Span& target) {
  if (m.rows() != target.dim_) throw std::invalid_argument("span preimage: dimension mismatch");
  const Coefficients& ctx = m.coefficients();
  ExactMatrix full = target.is_zero() ? m : ExactMatrix::hconcat(m, target.generator_matrix().scaled(Scalar(-1)));
  KernelImage ki = kernel_image(full);
  std::vector<Vector> out;
  for (const auto& k : ki.kernel) out.emplace_back(k.begin(), k.begin() + m.cols());
  return from_vectors(ctx, m.cols(), out);
}

Subquotient::Subquotient(Span numerator, Span denominator) : num_(std::move(numerator)), den_(std::move(denominator)) {
  const Coefficients& ctx = num_.coefficients();
  const int r = num_.size();
  std::vector<Vector> relations;
  for (const auto& g : den_.generators()) {
    auto c = num_.coordinates(g);
    if (!c) throw MembershipError("subquotient: denominator generator outside numerator");
    relations.push_back(std::move(*c));
  }
  if (ctx.is_finite()) {
    for (int i = 0; i < r; ++i) {
      int e = num_.exponents()[u(i)];
      if (e == 0) continue;
      Vector col = zero_vector(r);
      col[u(i)] = ctx.prime_power(ctx.exponent() - e);
      relations.push_back(std::move(col));
    }
  }
  if (r == 0) return;
  SmithForm snf = smith_normal_form(ExactMatrix::from_columns(ctx, r, relations));
  ExactMatrix basis = num_.generator_matrix() * snf.left_inverse;
  for (int i = 0; i < r; ++i) {
    int order = i < snf.rank ? snf.exponents[u(i)] : -1;
    if (order == 0) continue;
    kept_.push_back(i);
    orders_.push_back(order);
    gens_.push_back(basis.column(i));
    if (order > 0)
      shape_.torsion.push_back(order);
    else
      ++shape_.free_rank;
  }
  transform_ = std::move(snf.left);
}

Subquotient Subquotient::of(const Span& numerator, const Span& denominator) {
  return Subquotient(numerator, numerator.intersect(denominator));
}

Vector Subquotient::coordinates(const Vector& x) const {
  auto c = num_.coordinates(x);
  if (!c) throw MembershipError("subquotient: element outside numerator");
  if (kept_.empty()) return {};
  const Coefficients& ctx = num_.coefficients();
  Vector y = transform_->apply(*c);
  Vector out(kept_.size());
  for (std::size_t i = 0; i < kept_.size(); ++i) {
    const Scalar& yi = y[u(kept_[i])];
    out[i] = orders_[i] > 0 ? ctx.reduce_mod_prime_power(yi, orders_[i]) : yi;
  }
  return out;
}

Vector Subquotient::lift(const Vector& coords) const {
  if (coords.size() != gens_.size()) throw std::invalid_argument("subquotient lift: coordinate length mismatch");
  const Coefficients& ctx = num_.coefficients();
  Vector out = zero_vector(num_.ambient_dim());
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    if (coords[i] == 0) continue;
    for (std::size_t j = 0; j < out.size(); ++j)
      if (gens_[i][j] != 0) out[j] += coords[i] * gens_[i][j];
  }
  for (auto& v : out) v = ctx.normalize(v);
  return out;
}

HomologyData homology_at(const ExactMatrix* incoming, const Term* source, const Term& here,
                         const ExactMatrix* outgoing, const Term* target) {
  Span cycles = here.numerator;
  if (outgoing != nullptr && !here.numerator.is_zero()) {
    // Solve inside the numerator: coefficients a with outgoing(N a) in D.
    ExactMatrix gens = here.numerator.generator_matrix();
    Span within = Span::preimage(*outgoing * gens, target->denominator);
    cycles = within.image(gens);
  }
  Span boundaries = here.denominator;
  if (incoming != nullptr) boundaries = boundaries + source->numerator.image(*incoming);
  Subquotient h = Subquotient::of(cycles, boundaries);
  return HomologyData{std::move(cycles), std::move(boundaries), std::move(h)};
}

Span direct_sum(const Coefficients& ctx, const std::vector<Span>& parts) {
  int dim = 0;
  for (const auto& part : parts) dim += part.ambient_dim();
  std::vector<Vector> vectors;
  int offset = 0;
  for (const auto& part : parts) {
    for (const auto& g : part.generators()) {
      Vector v = zero_vector(dim);
      for (std::size_t i = 0; i < g.size(); ++i) v[static_cast<std::size_t>(offset) + i] = g[i];
      vectors.push_back(std::move(v));
    }
    offset += part.ambient_dim();
  }
  return Span::from_vectors(ctx, dim, vectors);
}

}  // namespace hbss
