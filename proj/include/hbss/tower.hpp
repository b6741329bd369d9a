#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "hbss/koszul.hpp"
#include "hbss/module.hpp"

namespace hbss {

/// Stages I^s (s = 0..s_max+1) and cells I^s/I^{s+1} (s = 0..s_max). All
/// modules are sub-quotients of the same free module T, so i and p are the
/// identity on ambient coordinates.
struct TowerOverT {
  std::vector<GradedModule> powers;
  std::vector<GradedModule> cells;
};

/// Quotients T/I^s (s = 0..s_max+1) and the cells I^s/I^{s+1}; q and j are
/// the identity on ambient coordinates.
struct TowerUnderT {
  std::vector<GradedModule> quotients;
  std::vector<GradedModule> cells;
};

/// One degreewise short-exactness check: family "E" is 0 -> I^{s+1} -> I^s ->
/// I^s/I^{s+1} -> 0, family "F" is 0 -> I^s/I^{s+1} -> T/I^{s+1} -> T/I^s -> 0.
struct SesRecord {
  char family = 'E';
  int s = 0;
  int degree = 0;
  bool exact = false;
  std::string detail;
};

enum class LimitStatus { kStabilized, kPAdic, kNotStabilized };

/// (T/I^s)_t for s = 1..s_max+1 and how the inverse system behaves.
struct LimitRecord {
  int degree = 0;
  std::vector<ModuleShape> stages;
  LimitStatus status = LimitStatus::kNotStabilized;
  /// First s from which every later stage has the same shape.
  std::optional<int> stabilized_at;
  /// "stabilized at s=2", "non-stabilizing, p-adic", "not stabilized by s=5".
  std::string label;
};

struct Towers {
  RegularSequence sequence;
  Window window;
  std::optional<int> cap;
  TowerOverT over;
  TowerUnderT under;
  std::vector<SesRecord> ses;
  bool all_exact = false;
  std::vector<LimitRecord> limits;
};

/// Builds both towers up to s_max = window.max_filtration after a regularity
/// certificate for S on T (NonRegular otherwise), and checks every E^s and
/// F^s degreewise on the window.
Towers build_towers(const RegularSequence& sequence, const Window& window);

/// 0 -> A -> B -> C -> 0 with identity maps on a common ambient, checked by
/// homology at all three spots.
bool short_exact(const Term& a, const Term& b, const Term& c);

struct TowerHomologyReport {
  bool i_star_zero = true;
  bool ses_exact = true;
  bool cofree = true;
  int checks = 0;
  /// HL_{k,t}(I^s/I^{s+1}) keyed by (s, k, t), over the Koszul ground.
  std::map<std::tuple<int, int, int>, ModuleShape> cells;
  std::vector<std::string> failures;

  bool ok() const { return i_star_zero && ses_exact && cofree; }
};

/// HL of every stage of the tower over T: i_* = 0, the sequences
/// 0 -> HL(I^s) -> HL(I^s/I^{s+1}) -> HL(I^{s+1})[-1] -> 0 are exact, and
/// HL(I^s/I^{s+1}) is L-free of rank Σ_{J, |μ| = s} rank L_{t - |x_J| - |x^μ|}.
TowerHomologyReport tower_homology(const Towers& towers);

struct CoupleReport {
  bool q_star_zero = true;
  bool exact = true;
  bool connecting_ranks_match = true;
  int checks = 0;
  /// Reduced HL_{k,t}(T/I^s) = HL_{k>=1}, keyed by (s, k, t).
  std::map<std::tuple<int, int, int>, ModuleShape> reduced;
  std::vector<std::string> failures;

  bool ok() const { return q_star_zero && exact && connecting_ranks_match; }
};

/// The unrolled exact couple from the tower under T: q_* = 0 on reduced HL,
/// exactness of ... -> HL(I^s/I^{s+1}) -> HL(T/I^{s+1}) -> HL(T/I^s) -> ...
/// at every spot, and reduced HL_k(T/I^s) ≅ HL_{k-1}(I^s) for k >= 1.
CoupleReport unrolled_couple(const Towers& towers);

struct AnnihilatorReport {
  bool ok = true;
  int checks = 0;
  std::vector<std::string> failures;
};

/// Every generator of I^s kills T/I^s and HL(T/I^s) on the window.
AnnihilatorReport annihilator_law(const Towers& towers, int s);

}  // namespace hbss
