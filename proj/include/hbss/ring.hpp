#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hbss/coefficients.hpp"
#include "hbss/expression.hpp"

namespace hbss {

struct RingGenerator {
  std::string name;
  int degree = 0;
  bool invertible = false;
};

/// Exponent per ring generator; only the invertible generator may go negative.
using Monomial = std::vector<int>;

/// Graded lexicographic order with x0 < x1 < ...: total exponent first, then
/// the exponent of the last variable, then the one before it.
bool grlex_less(const Monomial& a, const Monomial& b);

/// All exponent vectors in n variables with total exponent s, grlex ascending.
std::vector<Monomial> symmetric_monomials(int n, int s);

class GradedRing;

/// Element of a graded ring; terms are normalized and nonzero.
class Polynomial {
 public:
  Polynomial(Coefficients ctx, int variables);
  static Polynomial term(const Coefficients& ctx, const Monomial& m, const Scalar& c = Scalar(1));

  const Coefficients& coefficients() const { return ctx_; }
  int variables() const { return vars_; }
  const std::map<Monomial, Scalar>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const Monomial& m, const Scalar& c);
  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial scaled(const Scalar& c) const;
  Polynomial power(int e) const;
  bool operator==(const Polynomial& o) const { return vars_ == o.vars_ && terms_ == o.terms_; }
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  /// Common degree of every term; nullopt for zero or inhomogeneous input.
  std::optional<int> homogeneous_degree(const GradedRing& ring) const;
  std::string to_string(const GradedRing& ring) const;

 private:
  Coefficients ctx_;
  int vars_;
  std::map<Monomial, Scalar> terms_;
};

/// Graded commutative ring ground[x_1, ..., x_m] with even-degree generators,
/// at most one of which is inverted.
class GradedRing {
 public:
  GradedRing(Coefficients ground, std::vector<RingGenerator> generators);

  const Coefficients& ground() const { return ground_; }
  const std::vector<RingGenerator>& generators() const { return gens_; }
  int size() const { return static_cast<int>(gens_.size()); }
  std::optional<int> index_of(const std::string& name) const;
  /// Index of the inverted generator, or -1.
  int invertible_index() const { return inv_; }
  /// Some degree piece has infinite rank: an inverted generator next to a
  /// non-inverted one.
  bool has_infinite_pieces() const;

  int degree(const Monomial& m) const;
  /// Total exponent of the non-inverted generators.
  int weight(const Monomial& m) const;
  /// Monomials of the given degree, grlex ascending. With `cap`, only those of
  /// weight <= cap. Throws WindowTooSmall if the piece is infinite and uncapped.
  std::vector<Monomial> monomials(int degree, std::optional<int> cap = std::nullopt) const;

  Polynomial zero() const { return Polynomial(ground_, size()); }
  Polynomial one() const;
  Polynomial constant(const Scalar& c) const;
  Polynomial generator(int i) const;
  /// Binds symbols to generators; the symbol `p` denotes the prime.
  Polynomial from_symbolic(const SymbolicPolynomial& poly) const;
  Polynomial parse(const std::string& text) const;

  std::string monomial_to_string(const Monomial& m) const;
  /// "Z_(3)[v1, v2^+-1]".
  std::string describe() const;
  /// Same generators with inversion dropped.
  GradedRing polynomial_cover() const;
  /// Same generators over a different ground ring.
  GradedRing with_ground(const Coefficients& ground) const;

  bool operator==(const GradedRing& o) const;

 private:
  Coefficients ground_;
  std::vector<RingGenerator> gens_;
  int inv_ = -1;
};

}  // namespace hbss
