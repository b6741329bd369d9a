#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hbss/exterior.hpp"
#include "hbss/module.hpp"

namespace hbss {

/// Homologically graded complex C_lo, ..., C_hi with d_k: C_k -> C_{k-1} of
/// internal degree 0. Each C_{k,t} is a subquotient of a free ambient.
/// Terms and differentials are produced on demand and cached (thread-safe).
class ChainComplexDW {
 public:
  using TermFn = std::function<Term(int k, int t)>;
  using DifferentialFn = std::function<ExactMatrix(int k, int t)>;
  using LabelFn = std::function<std::string(int k, int t, const Vector& v)>;

  ChainComplexDW(Coefficients ctx, int lo, int hi, TermFn term, DifferentialFn differential, LabelFn label);

  const Coefficients& coefficients() const { return ctx_; }
  int min_index() const { return lo_; }
  int max_index() const { return hi_; }
  /// Zero outside [lo, hi].
  const Term& term(int k, int t) const;
  int ambient_dim(int k, int t) const { return term(k, t).numerator.ambient_dim(); }
  /// d_k: C_{k,t} -> C_{k-1,t}.
  const ExactMatrix& differential(int k, int t) const;
  HomologyData homology(int k, int t) const;
  std::string describe(int k, int t, const Vector& v) const { return label_(k, t, v); }

  /// First (k, t) in the degree range where d_{k-1} d_k is not entrywise zero.
  std::optional<std::pair<int, int>> square_zero_failure(int degree_min, int degree_max) const;

 private:
  Coefficients ctx_;
  int lo_;
  int hi_;
  TermFn term_fn_;
  DifferentialFn diff_fn_;
  LabelFn label_;

  struct Cache;
  std::shared_ptr<Cache> cache_;
};

/// K(S; M): C_k = ⊕_{|J|=k} M e_J, e_J of internal degree |x_J|, with
/// d(m e_J) = Σ_l (-1)^{l+1} x_{j_l} m e_{J \ j_l}. Verifies d^2 = 0 on the
/// window and throws NonSquareZero otherwise.
ChainComplexDW koszul_complex(const RegularSequence& sequence, const GradedModule& module, const Window& window);

/// Ground ring of Koszul homology: F_p when some x_j is a unit times p
/// (the homology is then killed by p), otherwise the ring's ground.
Coefficients koszul_ground(const RegularSequence& sequence);

/// Rewrites a shape computed over `from` as a shape over `to`. Going from
/// Z_(p) to F_p requires every summand to be Z/p; throws Error otherwise.
ModuleShape over_ground(const ModuleShape& shape, const Coefficients& from, const Coefficients& to);

/// F^1-extension check: the connecting map of 0 -> J/J^2 -> R/J^2 -> L -> 0
/// sends e_j to unit_j * {x_j}.
struct ExtensionCertificate {
  bool certified = false;
  std::vector<Scalar> units;
  std::string detail;
};

struct TorExtResult {
  /// Tor_{k,t}: cell (k, t), generators labelled by Koszul cycles ("e0", "v1*e0e1").
  BigradedModule tor;
  /// Ext^{k,t}: cell (k, t) dual to Tor_{k,-t}, generators labelled "f0", "f0f1".
  BigradedModule ext;
  std::optional<ExtensionCertificate> extension;
};

/// H_k(K(S; M)) for k = 0..n and t in the window. Non-regular S is allowed.
TorExtResult koszul_homology(const RegularSequence& sequence, const GradedModule& module, const Window& window);

/// Ext^{k,t} as the degreewise ground-dual of Tor_{k,-t}, plus the F^1
/// certificate. Throws NotFreeError when some Tor cell is not free.
TorExtResult ext_groups(const RegularSequence& sequence, const GradedModule& module, const Window& window);

/// Sign convention for δ*. Alternating: δ(e_I ⊗ f) = Σ_l (-1)^{l+1} e_{I \ i_l} ⊗ x_{i_l} f.
/// Negated: the overall negative, under which δ(e_j) = -{x_j}.
enum class DeltaConvention { kAlternating, kNegated };

/// e_I ⊗ {x^f} ⊗ λ with λ a monomial of L.
struct ResolutionBasis {
  IndexSet e;
  Monomial f;
  Monomial lambda;

  bool operator<(const ResolutionBasis& o) const {
    return std::tie(e, f, lambda) < std::tie(o.e, o.f, o.lambda);
  }
  bool operator==(const ResolutionBasis& o) const { return e == o.e && f == o.f && lambda == o.lambda; }
};

struct ResolutionTerm {
  Scalar coefficient;
  ResolutionBasis basis;
};

struct ExactnessRecord {
  int stage = 0;
  int degree = 0;
  int image_rank = 0;
  int kernel_rank = 0;
  bool exact = false;
};

struct ExactnessCertificate {
  bool exact = false;
  bool square_zero = false;
  std::vector<ExactnessRecord> records;
  std::optional<std::string> failure;
};

/// 0 -> L -> HL(L) -> HL(L) ⊗ J/J^2 -> ... with C^s = Λ_L(e_j) ⊗ J^s/J^{s+1}
/// and the derivation differential δ^s: C^s -> C^{s+1}. Internal degree of
/// e_I ⊗ {x^f} ⊗ λ is |x_I| + |x^f| + |λ|; δ preserves it.
class ResolutionComplex {
 public:
  ResolutionComplex(RegularSequence sequence, int length);

  const RegularSequence& sequence() const { return sequence_; }
  const ResidueRing& residue() const { return residue_; }
  const Coefficients& ground() const { return residue_.ring.ground(); }
  int length() const { return length_; }
  /// Internal convention; the other one is available through `convention_note` and printing.
  static constexpr DeltaConvention kInternal = DeltaConvention::kAlternating;
  static std::string convention_note();

  std::vector<ResolutionBasis> basis(int stage, int degree) const;
  int degree(const ResolutionBasis& b) const;
  /// δ^s: C^s_t -> C^{s+1}_t in the bases above.
  ExactMatrix delta(int stage, int degree) const;
  std::vector<ResolutionTerm> delta_of(const ResolutionBasis& b,
                                       DeltaConvention convention = DeltaConvention::kAlternating) const;
  /// "e1*{p}", "v2*e0e1*{v1^2}", "1".
  std::string label(const ResolutionBasis& b) const;
  std::string to_string(const std::vector<ResolutionTerm>& terms) const;

  const ExactnessCertificate& certificate() const { return certificate_; }
  void set_certificate(ExactnessCertificate c) { certificate_ = std::move(c); }

 private:
  RegularSequence sequence_;
  ResidueRing residue_;
  int length_;
  ExactnessCertificate certificate_;
};

/// Builds the complex to stage `length` (default max_filtration + 1) after a
/// regularity check of S on R (NonRegular otherwise), then certifies δ^2 = 0,
/// exactness at every stage >= 1 and ker δ^0 = L · 1 in every window degree.
ResolutionComplex relative_injective_resolution(const GradedRing& ring, const RegularSequence& sequence,
                                                std::optional<int> length, const Window& window);

/// Certificate computation on its own.
ExactnessCertificate certify_resolution(const ResolutionComplex& complex, const Window& window);

}  // namespace hbss
