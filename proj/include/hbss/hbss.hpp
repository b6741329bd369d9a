#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hbss/exterior.hpp"
#include "hbss/module.hpp"

namespace hbss {

using Bidegree = std::pair<int, int>;

/// Ambient vector -> canonical coordinates of a cell, chained through the
/// earlier pages it was computed from.
struct CoordinateMap {
  Subquotient quotient;
  std::shared_ptr<const CoordinateMap> parent;

  /// nullopt when the vector does not lie in the cell's numerator.
  std::optional<Vector> coordinates(const Vector& ambient) const;
};

/// E_r^{s,t}: s is the filtration, t the total degree.
struct Cell {
  int s = 0;
  int t = 0;
  /// Over the page's display ground.
  ModuleShape shape;
  /// Order exponent of each generator over the coordinate ring; -1 for free.
  std::vector<int> orders;
  /// Ambient lift of each generator.
  std::vector<Vector> representatives;
  std::vector<std::string> labels;
  /// The value may be affected by window or filtration truncation.
  bool masked = false;
  std::shared_ptr<const CoordinateMap> map;

  int size() const { return static_cast<int>(orders.size()); }
  bool is_zero() const { return orders.empty(); }
  std::optional<Vector> coordinates(const Vector& ambient) const;
};

/// d_r: E_r^{from} -> E_r^{to}, to = (s + r, t - 1); matrix is target
/// coordinates by source generators, entries reduced modulo target orders.
struct Differential {
  int r = 1;
  Bidegree from;
  Bidegree to;
  ExactMatrix matrix;
};

struct Page {
  Page(int r, Coefficients ground, Coefficients coordinates)
      : r(r), ground(std::move(ground)), coordinates(std::move(coordinates)) {}

  int r = 1;
  /// Ring over which cell shapes are reported.
  Coefficients ground;
  /// Ring of coordinates and matrix entries.
  Coefficients coordinates;
  /// Cells realized on this page; anything outside is unknown.
  int s_min = 0;
  int s_max = 0;
  int t_min = 0;
  int t_max = 0;
  std::map<Bidegree, Cell> cells;
  std::vector<Differential> differentials;
  /// Set once every later differential is known to vanish.
  bool permanent = false;

  bool in_region(int s, int t) const { return s >= s_min && s <= s_max && t >= t_min && t <= t_max; }
  const Cell* cell(int s, int t) const;
  const Differential* differential(Bidegree from) const;
  int masked_count() const;
};

/// E_1 = gr_I(T) ⊗_L M with d_1(x̄^μ ⊗ m) = Σ_j x̄^{μ+e_j} ⊗ Q_j(m), realized on
/// s in [0, s_max + 1], t in [degree_min - 1, degree_max + 1]. M lives over the
/// residue ring L and its operators must match the degrees of the sequence.
Page e1_from_comodule(const RegularSequence& sequence, const BocksteinComodule& comodule, const Window& window);

/// Homology of the page under the given d_r. Cells whose incoming or outgoing
/// differential leaves the page or meets a masked cell are masked. Throws
/// NonSquareZero if d_r d_r != 0 on an unmasked cell.
Page turn_page(const Page& page, const std::vector<Differential>& differentials);
Page turn_page(const Page& page);

/// gr of H(N ⊗ T/I^{s_max+1}) by filtration, with a comparison against the
/// truncation at s_max + 2.
struct Abutment {
  explicit Abutment(Coefficients ground) : ground(std::move(ground)) {}

  std::string label = "gr of truncated completion";
  int truncation = 0;
  Coefficients ground;
  /// Cell (s, t): F^s H_t / F^{s+1} H_t, over the display ground.
  std::map<Bidegree, ModuleShape> graded;
  /// H_t over the ring's ground.
  std::map<int, ModuleShape> total;
  /// Cell unchanged when the truncation is raised by one.
  std::map<Bidegree, bool> stable;
  /// Free ranks of the graded pieces add up to the total in every degree.
  bool consistent = true;
};

struct TurnCheck {
  int r = 1;
  int compared = 0;
  std::vector<std::string> mismatches;
};

/// Observed x_j-linearity of stored d_r; never assumed.
struct LinearityObservation {
  int r = 1;
  int checks = 0;
  bool linear = true;
  std::string first_failure;
};

namespace detail {
class FilteredModel;
}

struct FilteredResult {
  /// Ambient vector in total degree t of c * u_J, u_J the Koszul generator
  /// of the relations indexed by J; c must be homogeneous of matching degree.
  Vector vector_of(const Polynomial& c, const IndexSet& relations, int t) const;

  std::shared_ptr<const detail::FilteredModel> model;
  std::vector<Page> pages;
  Abutment abutment;
  std::vector<TurnCheck> turn_checks;
  std::vector<LinearityObservation> linearity;
  RegularityReport regularity;
};

/// Spectral sequence of the I-adic filtration on a Koszul resolution of N,
/// computed over T/I^{s_max+1}. N is cyclic with relations forming a regular
/// sequence, or free of rank one. Cells with s + r > s_max + 1 are masked.
/// Pages 1..max_page on s in [0, s_max], t in the window.
FilteredResult filtered_ss(const GradedModule& module, const RegularSequence& sequence, const Window& window);

/// The abutment alone.
Abutment filtered_abutment(const GradedModule& module, const RegularSequence& sequence, const Window& window);

struct ParityCertificate {
  bool collapsed = false;
  int checked = 0;
  /// First nonzero unmasked cell of odd total degree.
  std::optional<Bidegree> odd_cell;
};

/// Every d_r lowers t by one, so a page concentrated in even t has no
/// further differentials.
ParityCertificate parity_collapse_check(const Page& page);

struct AbutmentDiscrepancy {
  int s = 0;
  int t = 0;
  ModuleShape page;
  ModuleShape abutment;
};

struct AbutmentReport {
  bool matches = true;
  /// Every stored differential on the last page is zero.
  bool last_page_stable = true;
  int compared = 0;
  int masked_excluded = 0;
  /// Abutment cells that change when the truncation is raised.
  int unstable_excluded = 0;
  std::vector<AbutmentDiscrepancy> discrepancies;
};

/// Compares the last page with the abutment on cells that are unmasked and
/// stable in the abutment.
AbutmentReport abutment_compare(const std::vector<Page>& pages, const Abutment& abutment);

}  // namespace hbss
