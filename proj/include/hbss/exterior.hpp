#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hbss/module.hpp"

namespace hbss {

/// Strictly ascending indices {i_1 < ... < i_k}: the monomial a_{i_1} ∧ ... ∧ a_{i_k}.
using IndexSet = std::vector<int>;

struct SignedIndexSet {
  int sign = 1;
  IndexSet set;
};

/// u ∧ v with the sign of the merge permutation; nullopt when u and v meet.
std::optional<SignedIndexSet> wedge(const IndexSet& u, const IndexSet& v);

/// k-element subsets of {0, ..., n-1}, lexicographic.
std::vector<IndexSet> index_subsets(int n, int k);
/// Every subset of {0, ..., n-1}, by size and then lexicographic.
std::vector<IndexSet> all_index_subsets(int n);
/// Subsets of `pool` (ascending), by size and then lexicographic.
std::vector<IndexSet> all_index_subsets(const IndexSet& pool);

/// "a0a2" for {0, 2}; "1" for the empty set.
std::string index_set_label(const IndexSet& set, const std::string& symbol = "a");

/// Linear combination of exterior monomials; zero coefficients are never stored.
using ExteriorElement = std::map<IndexSet, Scalar>;

ExteriorElement exterior_monomial(const IndexSet& set, const Scalar& coefficient = Scalar(1));
ExteriorElement wedge(const ExteriorElement& u, const ExteriorElement& v);
/// The derivation ∂/∂a_j: a_i ↦ δ_ij, with ∂(u ∧ v) = ∂u ∧ v + (-1)^|u| u ∧ ∂v.
ExteriorElement partial_derivation(int j, const ExteriorElement& element);
std::string exterior_to_string(const ExteriorElement& element, const std::string& symbol = "a");

/// Λ_F(a_0, ..., a_{n-1}) over a graded ground ring F, |a_j| = |x_j| + 1.
class ExteriorStructure {
 public:
  ExteriorStructure(GradedRing ground, std::vector<int> x_degrees);

  const GradedRing& ground() const { return ground_; }
  int size() const { return static_cast<int>(x_degrees_.size()); }
  int x_degree(int j) const { return x_degrees_[static_cast<std::size_t>(j)]; }
  int generator_degree(int j) const { return x_degree(j) + 1; }
  int degree(const IndexSet& set) const;
  std::vector<IndexSet> basis() const { return all_index_subsets(size()); }

 private:
  GradedRing ground_;
  std::vector<int> x_degrees_;
};

/// A graded F-module with operators Q_0, ..., Q_{n-1}, Q_j of degree -(|x_j| + 1).
/// Each Q_j is stored by its values on the generators of the underlying
/// presentation and extended F-linearly.
class BocksteinComodule {
 public:
  /// images[j][g] = Q_j(generator g).
  BocksteinComodule(GradedModule module, std::vector<int> x_degrees, std::vector<std::vector<FreeElement>> images);

  /// Λ_F(a_j : j in active) with Q_j = ∂/∂a_j for active j and Q_j = 0 otherwise.
  static BocksteinComodule exterior(const GradedRing& ground, const std::vector<int>& x_degrees,
                                    const IndexSet& active);
  /// F itself with every Q_j = 0.
  static BocksteinComodule trivial(const GradedRing& ground, const std::vector<int>& x_degrees);

  const GradedModule& module() const { return module_; }
  int size() const { return static_cast<int>(x_degrees_.size()); }
  const std::vector<int>& x_degrees() const { return x_degrees_; }
  int x_degree(int j) const { return x_degrees_[static_cast<std::size_t>(j)]; }
  int operator_degree(int j) const { return x_degree(j) + 1; }
  const FreeElement& image(int j, int generator) const {
    return images_[static_cast<std::size_t>(j)][static_cast<std::size_t>(generator)];
  }
  const std::vector<std::vector<FreeElement>>& images() const { return images_; }

  /// Ambient matrix of Q_j from degree d to degree d - |Q_j|.
  ExactMatrix operator_matrix(int j, int degree) const;

 private:
  GradedModule module_;
  std::vector<int> x_degrees_;
  std::vector<std::vector<FreeElement>> images_;
};

struct ComoduleViolation {
  enum class Kind { kSquare, kAnticommute, kRelation, kSubmodule };
  Kind kind = Kind::kSquare;
  int i = 0;
  int j = 0;
  int degree = 0;
  /// Ambient vector in the source degree on which the identity fails.
  Vector vector;
  std::string description;
};

struct ComoduleCertificate {
  bool valid = false;
  int degree_min = 0;
  int degree_max = 0;
  std::vector<ComoduleViolation> violations;

  std::string summary() const;
};

/// Checks Q_j^2 = 0, Q_iQ_j + Q_jQ_i = 0 and that each Q_j preserves the
/// numerator and the relations, in every degree of the window.
ComoduleCertificate validate_comodule(const BocksteinComodule& comodule, const Window& window);

/// Cohomology of M ⊗ Sym(y_0, ..., y_{n-1}) with differential Σ_j Q_j ⊗ y_j,
/// y_j in bidegree (1, |x_j|). Cell (s, t) has filtration s and total degree t.
BigradedModule coext(const BocksteinComodule& comodule, const Window& window);

}  // namespace hbss
