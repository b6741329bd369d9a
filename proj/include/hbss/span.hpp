#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hbss/matrix.hpp"

namespace hbss {

/// Isomorphism type of a finitely generated module over the ground ring:
/// R^free_rank plus cyclic summands R/p^e, exponents ascending.
struct ModuleShape {
  int free_rank = 0;
  std::vector<int> torsion;

  bool is_zero() const { return free_rank == 0 && torsion.empty(); }
  int summands() const { return free_rank + static_cast<int>(torsion.size()); }
  /// Sum of torsion exponents.
  int torsion_length() const;
  /// Rewrites free summands over F_p or Z/p^k as torsion over Z_(p).
  ModuleShape as_p_local(const Coefficients& ground) const;
  /// "Z_(3)^2 + Z/9" style description.
  std::string describe(const Coefficients& ground) const;

  ModuleShape operator+(const ModuleShape& other) const;
  bool operator==(const ModuleShape& o) const { return free_rank == o.free_rank && torsion == o.torsion; }
  bool operator!=(const ModuleShape& o) const { return !(*this == o); }
};

/// A submodule of R^n stored through its Smith form: generators g_i = p^{e_i} w_i
/// with (w_i) part of a basis of R^n; `left` maps x to its coordinates in that basis.
class Span {
 public:
  Span(Coefficients ctx, int ambient_dim);

  static Span from_vectors(const Coefficients& ctx, int ambient_dim, const std::vector<Vector>& vectors);
  static Span whole(const Coefficients& ctx, int ambient_dim);
  static Span from_matrix_columns(const ExactMatrix& m);

  const Coefficients& coefficients() const { return ctx_; }
  int ambient_dim() const { return dim_; }
  const std::vector<Vector>& generators() const { return gens_; }
  const std::vector<int>& exponents() const { return exps_; }
  int size() const { return static_cast<int>(gens_.size()); }
  bool is_zero() const { return gens_.empty(); }

  /// Coordinates with respect to generators(); nullopt when x is not in the span.
  std::optional<Vector> coordinates(const Vector& x) const;
  bool contains(const Vector& x) const { return coordinates(x).has_value(); }
  bool contains(const Span& other) const;
  bool operator==(const Span& other) const { return contains(other) && other.contains(*this); }
  bool operator!=(const Span& other) const { return !(*this == other); }

  Span operator+(const Span& other) const;
  Span intersect(const Span& other) const;
  /// Image of the span under m (m.cols() == ambient_dim()).
  Span image(const ExactMatrix& m) const;
  /// {x : m x in target}.
  static Span preimage(const ExactMatrix& m, const Span& target);

  ExactMatrix generator_matrix() const;

 private:
  Coefficients ctx_;
  int dim_;
  std::vector<Vector> gens_;
  std::vector<int> exps_;
  std::optional<ExactMatrix> left_;
};

/// Block direct sum in the concatenated ambient.
Span direct_sum(const Coefficients& ctx, const std::vector<Span>& parts);

/// numerator / denominator for spans in a common ambient, denominator inside numerator.
class Subquotient {
 public:
  /// Throws MembershipError unless denominator is contained in numerator.
  Subquotient(Span numerator, Span denominator);
  /// numerator / (numerator ∩ denominator).
  static Subquotient of(const Span& numerator, const Span& denominator);

  const Span& numerator() const { return num_; }
  const Span& denominator() const { return den_; }
  const ModuleShape& shape() const { return shape_; }
  int size() const { return static_cast<int>(gens_.size()); }
  /// Ambient representatives: torsion generators by ascending order, then free ones.
  const std::vector<Vector>& generators() const { return gens_; }
  /// Order exponent of each generator; -1 for free generators.
  const std::vector<int>& orders() const { return orders_; }

  /// Canonical coordinates of the class of x; throws MembershipError if x is
  /// not in the numerator.
  Vector coordinates(const Vector& x) const;
  bool is_zero_class(const Vector& x) const { return den_.contains(x); }
  /// Ambient vector representing the given coordinates.
  Vector lift(const Vector& coords) const;

 private:
  Span num_;
  Span den_;
  ModuleShape shape_;
  std::vector<Vector> gens_;
  std::vector<int> orders_;
  std::vector<int> kept_;
  std::optional<ExactMatrix> transform_;
};

/// Homology at N/D of a complex of subquotients of free modules, given by
/// ambient matrices `incoming` (into this term) and `outgoing` (out of it).
/// Either map may be absent.
struct Term {
  Span numerator;
  Span denominator;
};

struct HomologyData {
  Span cycles;
  Span boundaries;  // image of incoming numerator plus denominator
  Subquotient homology;
};

HomologyData homology_at(const ExactMatrix* incoming, const Term* source, const Term& here,
                         const ExactMatrix* outgoing, const Term* target);

}  // namespace hbss
