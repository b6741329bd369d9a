#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hbss/ring.hpp"
#include "hbss/span.hpp"

namespace hbss {

/// Degree range, filtration cap and page cap for a computation.
struct Window {
  int degree_min = 0;
  int degree_max = 0;
  int max_filtration = 1;
  int max_page = 1;

  /// Throws ValidationError unless degree_min <= degree_max and both caps >= 1.
  void validate() const;
  bool contains(int degree) const { return degree >= degree_min && degree <= degree_max; }
};

struct ModuleGenerator {
  std::string name;
  int degree = 0;
};

/// Element of a free module: one ring coefficient per generator.
using FreeElement = std::vector<Polynomial>;

/// N / (N ∩ D) for submodules N (numerator) and D (relations) of a finitely
/// generated free graded module F. N defaults to F. With a cap, everything is
/// computed modulo the monomials of weight above the cap.
class GradedModule {
 public:
  struct BasisElement {
    int generator;
    Monomial monomial;
  };

  struct Piece {
    int degree;
    std::vector<BasisElement> basis;
    std::map<std::pair<int, Monomial>, int> index;
    Span numerator;
    Span denominator;
    Subquotient quotient;

    Term term() const { return Term{numerator, denominator}; }
  };

  GradedModule(GradedRing ring, std::vector<ModuleGenerator> generators, std::vector<FreeElement> relations = {},
               std::optional<std::vector<FreeElement>> numerator = std::nullopt,
               std::optional<int> cap = std::nullopt);

  /// T / (relations) on one generator of degree 0.
  static GradedModule cyclic(const GradedRing& ring, const std::vector<Polynomial>& relations,
                             std::optional<int> cap = std::nullopt);

  const GradedRing& ring() const { return ring_; }
  const std::vector<ModuleGenerator>& generators() const { return gens_; }
  const std::vector<FreeElement>& relations() const { return relations_; }
  const std::optional<std::vector<FreeElement>>& numerator() const { return numerator_; }
  std::optional<int> cap() const { return cap_; }

  FreeElement zero_element() const;
  FreeElement basis_element(int generator) const;
  FreeElement times(const Polynomial& x, const FreeElement& e) const;
  std::optional<int> element_degree(const FreeElement& e) const;
  std::string element_to_string(const FreeElement& e) const;

  /// Cached, thread-safe.
  const Piece& piece(int degree) const;
  ModuleShape shape(int degree) const { return piece(degree).quotient.shape(); }
  int ambient_dim(int degree) const { return static_cast<int>(piece(degree).basis.size()); }
  /// Ambient coordinates of a homogeneous element; terms above the cap are dropped.
  Vector vector_of(const FreeElement& e, int degree) const;
  FreeElement element_of(const Vector& v, int degree) const;
  std::string vector_to_string(const Vector& v, int degree) const;
  /// Multiplication by a homogeneous x from the ambient of `degree` to that of degree + |x|.
  ExactMatrix multiplication(const Polynomial& x, int degree) const;

  /// Generators of N: the numerator if present, else the free generators.
  std::vector<FreeElement> numerator_generators() const;
  GradedModule with_relations(const std::vector<FreeElement>& extra) const;
  /// M / (xs) M.
  GradedModule quotient_by(const std::vector<Polynomial>& xs) const;
  GradedModule with_cap(std::optional<int> cap) const;
  /// The same presentation over `ring`, which must have the same generator
  /// names and degrees. Throws ValidationError on negative exponents when the
  /// target does not invert the generator.
  GradedModule over_ring(const GradedRing& ring) const;

 private:
  std::vector<Vector> spanning_vectors(const std::vector<FreeElement>& elements, const Piece& p) const;

  GradedRing ring_;
  std::vector<ModuleGenerator> gens_;
  std::vector<FreeElement> relations_;
  std::optional<std::vector<FreeElement>> numerator_;
  std::optional<int> cap_;

  struct Cache;
  std::shared_ptr<Cache> cache_;
};

/// The sequence S = (x_0, ..., x_{n-1}) and the ideal I it generates.
class RegularSequence {
 public:
  RegularSequence(GradedRing ring, std::vector<Polynomial> elements, std::vector<std::string> labels = {});
  static RegularSequence parse(const GradedRing& ring, const std::vector<std::string>& texts);

  const GradedRing& ring() const { return ring_; }
  const std::vector<Polynomial>& elements() const { return elements_; }
  const Polynomial& element(int j) const { return elements_[static_cast<std::size_t>(j)]; }
  int size() const { return static_cast<int>(elements_.size()); }
  int degree(int j) const { return degrees_[static_cast<std::size_t>(j)]; }
  const std::string& label(int j) const { return labels_[static_cast<std::size_t>(j)]; }

  /// Ring generator index when x_j is that generator verbatim, -1 when x_j = p.
  std::optional<int> verbatim(int j) const;
  bool contains_prime() const;
  /// True when every non-inverted ring generator occurs verbatim in S, so that
  /// weight-capped truncation is exact modulo I^(cap+1).
  bool supports_cap() const;

  /// Total degree of x^e for an exponent vector e of length n.
  int monomial_degree(const Monomial& e) const;
  Polynomial monomial_value(const Monomial& e) const;
  /// "p^2*v1" style name of x^e; "1" for the empty monomial.
  std::string monomial_label(const Monomial& e) const;

 private:
  GradedRing ring_;
  std::vector<Polynomial> elements_;
  std::vector<std::string> labels_;
  std::vector<int> degrees_;
};

/// Weight cap that keeps computations exact modulo I^(max_filtration + 2):
/// nullopt when the ring has finite pieces, max_filtration + 1 otherwise.
/// Throws ValidationError when the ring needs a cap the sequence cannot support.
std::optional<int> truncation_cap(const RegularSequence& sequence, int max_filtration);

/// Generators of I^s: the values of all degree-s monomials in x_0..x_{n-1}, grlex ascending.
std::vector<Polynomial> ideal_power(const RegularSequence& sequence, int s);
/// I^s as a submodule of T.
GradedModule ideal_power_module(const RegularSequence& sequence, int s, std::optional<int> cap = std::nullopt);
/// I^s / I^(s+1).
GradedModule graded_piece_module(const RegularSequence& sequence, int s, std::optional<int> cap = std::nullopt);
/// M / I^s M.
GradedModule quotient_module(const GradedModule& module, const RegularSequence& sequence, int s);

struct RegularityViolation {
  int index = 0;
  int degree = 0;
  Vector witness;
  std::string description;
};

struct RegularityReport {
  bool regular = false;
  bool via_polynomial_cover = false;
  /// Source degree range checked for each x_i.
  std::vector<std::pair<int, int>> checked;
  std::optional<int> nonzero_quotient_degree;
  std::optional<RegularityViolation> violation;

  std::string summary() const;
};

/// Injectivity of x_i on M/(x_0..x_{i-1})M over every source degree d with
/// d and d + |x_i| inside the window, and M/SM != 0 somewhere in the window.
RegularityReport regularity_check(const GradedModule& module, const RegularSequence& sequence, const Window& window);

/// L = T/I; only defined when every x_j is p or a ring generator.
struct ResidueRing {
  GradedRing ring;
  /// T-generator index of each L-generator.
  std::vector<int> kept;
};

ResidueRing residue_ring(const RegularSequence& sequence);

struct BigradedCell {
  ModuleShape shape;
  std::vector<std::string> labels;
};

/// Cells indexed by (s, t); absent cells are zero.
struct BigradedModule {
  Coefficients ground;
  std::map<std::pair<int, int>, BigradedCell> cells;

  ModuleShape shape(int s, int t) const;
};

/// gr_I(T) = Sym_L(I/I^2) on the window: cell (s, t) is free over L on the
/// degree-s monomials in the classes {x_j}.
BigradedModule associated_graded(const RegularSequence& sequence, const Window& window);

}  // namespace hbss
