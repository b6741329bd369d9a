#include "hbss/tower.hpp"

#include "hbss/errors.hpp"

namespace hbss {
namespace {

inline std::size_t u(int i) { return static_cast<std::size_t>(i); }

std::string at(int s, int k, int t) {
  return "(s=" + std::to_string(s) + ", k=" + std::to_string(k) + ", t=" + std::to_string(t) + ")";
}

// x acting blockwise on K_{k,t}(S; M) -> K_{k,t+|x|}(S; M).
ExactMatrix koszul_multiplication(const RegularSequence& seq, const GradedModule& m, const Polynomial& x, int dx,
                                  int k, int t) {
  std::vector<int> src_off, tgt_off, degrees;
  int src_dim = 0, tgt_dim = 0;
  for (const auto& set : index_subsets(seq.size(), k)) {
    int dj = 0;
    for (int j : set) dj += seq.degree(j);
    degrees.push_back(t - dj);
    src_off.push_back(src_dim);
    tgt_off.push_back(tgt_dim);
    src_dim += m.ambient_dim(t - dj);
    tgt_dim += m.ambient_dim(t + dx - dj);
  }
  ExactMatrix out(m.ring().ground(), tgt_dim, src_dim);
  for (std::size_t b = 0; b < degrees.size(); ++b)
    out.add_block(tgt_off[b], src_off[b], m.multiplication(x, degrees[b]));
  return out;
}

int predicted_cofree_rank(const RegularSequence& seq, const ResidueRing& l, int s, int k, int t) {
  int rank = 0;
  for (const auto& set : index_subsets(seq.size(), k)) {
    int dj = 0;
    for (int j : set) dj += seq.degree(j);
    for (const auto& mu : symmetric_monomials(seq.size(), s))
      rank += static_cast<int>(l.ring.monomials(t - dj - seq.monomial_degree(mu)).size());
  }
  return rank;
}

}  // namespace

bool short_exact(const Term& a, const Term& b, const Term& c) {
  const Coefficients& ctx = b.numerator.coefficients();
  const int n = b.numerator.ambient_dim();
  ExactMatrix id = ExactMatrix::identity(ctx, n);
  return homology_at(nullptr, nullptr, a, &id, &b).homology.shape().is_zero() &&
         homology_at(&id, &a, b, &id, &c).homology.shape().is_zero() &&
         homology_at(&id, &b, c, nullptr, nullptr).homology.shape().is_zero();
}

Towers build_towers(const RegularSequence& seq, const Window& window) {
  window.validate();
  const int smax = window.max_filtration;
  const std::optional<int> cap = truncation_cap(seq, smax);
  GradedModule t = GradedModule::cyclic(seq.ring(), {}, cap);
  auto regular = regularity_check(t, seq, window);
  if (!regular.regular) throw NonRegular(regular.summary());

  Towers out{seq, window, cap, {}, {}, {}, true, {}};
  for (int s = 0; s <= smax + 1; ++s) {
    out.over.powers.push_back(ideal_power_module(seq, s, cap));
    out.under.quotients.push_back(s == 0 ? GradedModule::cyclic(seq.ring(), {seq.ring().parse("1")}, cap)
                                         : quotient_module(t, seq, s));
  }
  for (int s = 0; s <= smax; ++s) out.over.cells.push_back(graded_piece_module(seq, s, cap));
  out.under.cells = out.over.cells;

  for (int s = 0; s <= smax; ++s)
    for (int d = window.degree_min; d <= window.degree_max; ++d) {
      bool e = short_exact(out.over.powers[u(s + 1)].piece(d).term(), out.over.powers[u(s)].piece(d).term(),
                           out.over.cells[u(s)].piece(d).term());
      out.ses.push_back(SesRecord{'E', s, d, e, e ? "" : "E^" + std::to_string(s) + " fails in degree " +
                                                               std::to_string(d)});
      bool f = short_exact(out.under.cells[u(s)].piece(d).term(), out.under.quotients[u(s + 1)].piece(d).term(),
                           out.under.quotients[u(s)].piece(d).term());
      out.ses.push_back(SesRecord{'F', s, d, f, f ? "" : "F^" + std::to_string(s) + " fails in degree " +
                                                               std::to_string(d)});
      out.all_exact = out.all_exact && e && f;
    }

  for (int d = window.degree_min; d <= window.degree_max; ++d) {
    LimitRecord rec;
    rec.degree = d;
    for (int s = 1; s <= smax + 1; ++s) rec.stages.push_back(out.under.quotients[u(s)].shape(d));
    int first = static_cast<int>(rec.stages.size()) - 1;
    while (first > 0 && rec.stages[u(first - 1)] == rec.stages.back()) --first;
    if (first < static_cast<int>(rec.stages.size()) - 1) {
      rec.status = LimitStatus::kStabilized;
      rec.stabilized_at = first + 1;
      rec.label = "stabilized at s=" + std::to_string(first + 1);
    } else if (seq.contains_prime()) {
      rec.status = LimitStatus::kPAdic;
      rec.label = "non-stabilizing, p-adic";
    } else {
      rec.status = LimitStatus::kNotStabilized;
      rec.label = "not stabilized by s=" + std::to_string(smax + 1);
    }
    out.limits.push_back(std::move(rec));
  }
  return out;
}

TowerHomologyReport tower_homology(const Towers& towers) {
  if (towers.cap)
    throw WindowTooSmall("tower homology needs finite degree pieces; " + towers.sequence.ring().describe() +
                         " is only realized up to a weight cap");
  const RegularSequence& seq = towers.sequence;
  const Window& w = towers.window;
  const int n = seq.size();
  const Coefficients& ctx = seq.ring().ground();
  const Coefficients ground = koszul_ground(seq);
  const ResidueRing l = residue_ring(seq);
  TowerHomologyReport rep;
  auto fail = [&](bool& flag, const std::string& why) {
    flag = false;
    rep.failures.push_back(why);
  };
  for (int s = 0; s < static_cast<int>(towers.over.cells.size()); ++s) {
    ChainComplexDW ka = koszul_complex(seq, towers.over.powers[u(s + 1)], w);
    ChainComplexDW kb = koszul_complex(seq, towers.over.powers[u(s)], w);
    ChainComplexDW kc = koszul_complex(seq, towers.over.cells[u(s)], w);
    for (int t = w.degree_min; t <= w.degree_max; ++t)
      for (int k = 0; k <= n; ++k) {
        HomologyData ha = ka.homology(k, t);
        HomologyData hb = kb.homology(k, t);
        HomologyData hc = kc.homology(k, t);
        rep.checks += 5;
        if (!hb.boundaries.contains(ha.cycles)) fail(rep.i_star_zero, "i_* != 0 at " + at(s, k, t));
        if (!hb.boundaries.contains(hb.cycles.intersect(hc.boundaries)))
          fail(rep.ses_exact, "p_* not injective at " + at(s, k, t));
        // Exactness at HL_k(C): cycles whose boundary dies in HL_{k-1}(A) are exactly Z_B + Bd_C.
        HomologyData ha_below = ka.homology(k - 1, t);
        Span ker_connecting = Span::preimage(kc.differential(k, t), ha_below.boundaries).intersect(hc.cycles);
        if (ker_connecting != hb.cycles + hc.boundaries)
          fail(rep.ses_exact, "not exact at HL(I^s/I^{s+1}) " + at(s, k, t));
        if (k >= 1) {
          HomologyData hb_below = kb.homology(k - 1, t);
          Span ker_i = ha_below.cycles.intersect(hb_below.boundaries);
          Span im_connecting = hc.cycles.image(kc.differential(k, t)) + ha_below.boundaries;
          if (ker_i != im_connecting) fail(rep.ses_exact, "not exact at HL(I^{s+1}) " + at(s, k - 1, t));
        }
        ModuleShape shape;
        try {
          shape = over_ground(hc.homology.shape(), ctx, ground);
        } catch (const Error& e) {
          fail(rep.cofree, "HL(I^s/I^{s+1}) is not free over L at " + at(s, k, t) + ": " + e.what());
          continue;
        }
        if (!shape.is_zero()) rep.cells[{s, k, t}] = shape;
        ModuleShape want{predicted_cofree_rank(seq, l, s, k, t), {}};
        if (shape != want)
          fail(rep.cofree, "HL(I^s/I^{s+1}) " + at(s, k, t) + " is " + shape.describe(ground) + ", expected " +
                               want.describe(ground));
      }
  }
  return rep;
}

CoupleReport unrolled_couple(const Towers& towers) {
  if (towers.cap)
    throw WindowTooSmall("the unrolled couple needs finite degree pieces; " + towers.sequence.ring().describe() +
                         " is only realized up to a weight cap");
  const RegularSequence& seq = towers.sequence;
  const Window& w = towers.window;
  const int n = seq.size();
  const Coefficients& ctx = seq.ring().ground();
  const Coefficients ground = koszul_ground(seq);
  CoupleReport rep;
  auto fail = [&](bool& flag, const std::string& why) {
    flag = false;
    rep.failures.push_back(why);
  };
  const int smax = static_cast<int>(towers.under.cells.size()) - 1;
  for (int s = 1; s <= smax; ++s) {
    ChainComplexDW kg = koszul_complex(seq, towers.under.cells[u(s)], w);
    ChainComplexDW kq1 = koszul_complex(seq, towers.under.quotients[u(s + 1)], w);
    ChainComplexDW kq0 = koszul_complex(seq, towers.under.quotients[u(s)], w);
    ChainComplexDW kp = koszul_complex(seq, towers.over.powers[u(s)], w);
    for (int t = w.degree_min; t <= w.degree_max; ++t)
      for (int k = 0; k <= n; ++k) {
        HomologyData hg = kg.homology(k, t);
        HomologyData hq1 = kq1.homology(k, t);
        HomologyData hq0 = kq0.homology(k, t);
        rep.checks += 2;
        if (k >= 1 && !hq0.boundaries.contains(hq1.cycles)) fail(rep.q_star_zero, "q_* != 0 at " + at(s, k, t));
        if (hq1.cycles.intersect(hq0.boundaries) != hg.cycles + hq1.boundaries)
          fail(rep.exact, "not exact at HL(T/I^{s+1}) " + at(s, k, t));
        HomologyData hg_below = kg.homology(k - 1, t);
        Span ker_theta = Span::preimage(kq0.differential(k, t), hg_below.boundaries).intersect(hq0.cycles);
        if (ker_theta != hq1.cycles + hq0.boundaries) fail(rep.exact, "not exact at HL(T/I^s) " + at(s, k, t));
        if (k >= 1) {
          rep.checks += 2;
          HomologyData hq1_below = kq1.homology(k - 1, t);
          Span ker_j = hg_below.cycles.intersect(hq1_below.boundaries);
          Span im_theta = hq0.cycles.image(kq0.differential(k, t)) + hg_below.boundaries;
          if (ker_j != im_theta) fail(rep.exact, "not exact at HL(I^s/I^{s+1}) " + at(s, k - 1, t));
          ModuleShape reduced = hq0.homology.shape();
          ModuleShape shifted = kp.homology(k - 1, t).homology.shape();
          if (reduced != shifted)
            fail(rep.connecting_ranks_match, "reduced HL(T/I^s) " + at(s, k, t) + " = " + reduced.describe(ctx) +
                                                 " but HL(I^s) one degree down is " + shifted.describe(ctx));
          try {
            ModuleShape r = over_ground(reduced, ctx, ground);
            if (!r.is_zero()) rep.reduced[{s, k, t}] = r;
          } catch (const Error&) {
            if (!reduced.is_zero()) rep.reduced[{s, k, t}] = reduced;
          }
        }
      }
  }
  return rep;
}

AnnihilatorReport annihilator_law(const Towers& towers, int s) {
  const RegularSequence& seq = towers.sequence;
  const Window& w = towers.window;
  if (s < 0 || s >= static_cast<int>(towers.under.quotients.size()))
    throw ValidationError("annihilator_law: stage " + std::to_string(s) + " was not built");
  const GradedModule& q = towers.under.quotients[u(s)];
  ChainComplexDW k = koszul_complex(seq, q, w);
  AnnihilatorReport rep;
  for (const auto& x : ideal_power(seq, s)) {
    const int dx = *x.homogeneous_degree(seq.ring());
    const std::string name = x.to_string(seq.ring());
    for (int t = w.degree_min; t <= w.degree_max; ++t) {
      ExactMatrix mult = q.multiplication(x, t);
      const auto& target = q.piece(t + dx);
      ++rep.checks;
      for (const auto& g : q.piece(t).numerator.generators())
        if (!target.denominator.contains(mult.apply(g))) {
          rep.ok = false;
          rep.failures.push_back(name + " does not kill T/I^" + std::to_string(s) + " in degree " +
                                 std::to_string(t));
          break;
        }
      for (int kk = 0; kk <= seq.size(); ++kk) {
        ++rep.checks;
        ExactMatrix km = koszul_multiplication(seq, q, x, dx, kk, t);
        Span image = k.homology(kk, t).cycles.image(km);
        if (!k.homology(kk, t + dx).boundaries.contains(image)) {
          rep.ok = false;
          rep.failures.push_back(name + " does not kill HL_" + std::to_string(kk) + "(T/I^" + std::to_string(s) +
                                 ") in degree " + std::to_string(t));
        }
      }
    }
  }
  return rep;
}

}  // namespace hbss
