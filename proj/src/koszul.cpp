#include "hbss/koszul.hpp"

#include <algorithm>
#include <mutex>
#include <regex>

#include "hbss/errors.hpp"
#include "hbss/smith.hpp"

namespace hbss {
namespace {

inline std::size_t u(int i) { return static_cast<std::size_t>(i); }

// Block structure of K(S; M) in bidegree (k, t).
struct KoszulLayout {
  std::vector<IndexSet> sets;
  std::vector<int> degrees;  // degree of the M piece in each block
  std::vector<int> offsets;
  std::map<IndexSet, int> index;
  int dim = 0;
};

KoszulLayout koszul_layout(const RegularSequence& seq, const GradedModule& m, int k, int t) {
  KoszulLayout out;
  for (auto& set : index_subsets(seq.size(), k)) {
    int dj = 0;
    for (int j : set) dj += seq.degree(j);
    out.index.emplace(set, static_cast<int>(out.sets.size()));
    out.degrees.push_back(t - dj);
    out.offsets.push_back(out.dim);
    out.dim += m.ambient_dim(t - dj);
    out.sets.push_back(std::move(set));
  }
  return out;
}

std::string tensor_label(const std::string& element, const std::string& basis) {
  if (basis == "1") return element;
  if (element == "1") return basis;
  if (element.find_first_of("+-", 1) != std::string::npos) return "(" + element + ")*" + basis;
  return element + "*" + basis;
}

std::string dual_label(const std::string& label) {
  static const std::regex pure("^(e[0-9]+)+$");
  if (label == "1") return label;
  if (std::regex_match(label, pure)) {
    std::string out = label;
    std::replace(out.begin(), out.end(), 'e', 'f');
    return out;
  }
  return "dual(" + label + ")";
}

// Index of the generator-times-1 basis vector of a cyclic module in degree 0.
std::optional<int> unit_index(const GradedModule& m) {
  const auto& piece = m.piece(0);
  auto it = piece.index.find({0, Monomial(u(m.ring().size()), 0)});
  if (it == piece.index.end()) return std::nullopt;
  return it->second;
}

ExtensionCertificate extension_certificate(const RegularSequence& seq, std::optional<int> cap) {
  ExtensionCertificate cert{true, {}, ""};
  const GradedRing& ring = seq.ring();
  const Coefficients& ctx = ring.ground();
  GradedModule t = GradedModule::cyclic(ring, {}, cap);
  GradedModule r_mod_j2 = quotient_module(t, seq, 2);
  GradedModule j_mod_j2 = graded_piece_module(seq, 1, cap);
  int lo = 0, hi = 0;
  for (int j = 0; j < seq.size(); ++j) hi = std::max(hi, seq.degree(j));
  ChainComplexDW k = koszul_complex(seq, r_mod_j2, Window{lo, hi, 1, 1});
  auto one = unit_index(r_mod_j2);
  for (int j = 0; j < seq.size(); ++j) {
    const int dj = seq.degree(j);
    KoszulLayout lay = koszul_layout(seq, r_mod_j2, 1, dj);
    if (!one) {
      cert.certified = false;
      cert.detail = "no unit class in degree 0";
      break;
    }
    Vector lift = zero_vector(lay.dim);
    lift[u(lay.offsets[u(lay.index.at({j}))] + *one)] = 1;
    Vector boundary = k.differential(1, dj).apply(lift);
    const auto& quotient = j_mod_j2.piece(dj).quotient;
    Vector c = quotient.coordinates(boundary);
    Vector cx = quotient.coordinates(j_mod_j2.vector_of(FreeElement{seq.element(j)}, dj));
    const auto& orders = quotient.orders();
    auto reduce = [&](const Scalar& x, std::size_t i) {
      return orders[i] < 0 ? ctx.normalize(x) : ctx.reduce_mod_prime_power(x, orders[i]);
    };
    std::optional<Scalar> unit;
    for (std::size_t i = 0; i < cx.size() && !unit; ++i)
      if (reduce(cx[i], i) != 0) unit = ctx.divide(c[i], cx[i]);
    bool ok = unit && ctx.is_unit(*unit);
    for (std::size_t i = 0; ok && i < c.size(); ++i) ok = reduce(c[i] - *unit * cx[i], i) == 0;
    cert.units.push_back(unit.value_or(Scalar(0)));
    if (!ok) {
      cert.certified = false;
      cert.detail = "connecting map on e" + std::to_string(j) + " is not a unit multiple of {" + seq.label(j) + "}";
      break;
    }
  }
  if (cert.certified) {
    cert.detail = "connecting map of 0 -> J/J^2 -> R/J^2 -> L -> 0 sends e_j to u_j {x_j} with units";
    for (const auto& x : cert.units) cert.detail += " " + x.get_str();
  }
  return cert;
}

}  // namespace

struct ChainComplexDW::Cache {
  std::recursive_mutex mutex;
  std::map<std::pair<int, int>, std::unique_ptr<Term>> terms;
  std::map<std::pair<int, int>, std::unique_ptr<ExactMatrix>> differentials;
};

ChainComplexDW::ChainComplexDW(Coefficients ctx, int lo, int hi, TermFn term, DifferentialFn differential,
                               LabelFn label)
    : ctx_(std::move(ctx)),
      lo_(lo),
      hi_(hi),
      term_fn_(std::move(term)),
      diff_fn_(std::move(differential)),
      label_(std::move(label)),
      cache_(std::make_shared<Cache>()) {}

const Term& ChainComplexDW::term(int k, int t) const {
  std::lock_guard<std::recursive_mutex> lock(cache_->mutex);
  auto key = std::make_pair(k, t);
  auto it = cache_->terms.find(key);
  if (it != cache_->terms.end()) return *it->second;
  auto made = std::make_unique<Term>(k < lo_ || k > hi_ ? Term{Span(ctx_, 0), Span(ctx_, 0)} : term_fn_(k, t));
  const Term& ref = *made;
  cache_->terms.emplace(key, std::move(made));
  return ref;
}

const ExactMatrix& ChainComplexDW::differential(int k, int t) const {
  std::lock_guard<std::recursive_mutex> lock(cache_->mutex);
  auto key = std::make_pair(k, t);
  auto it = cache_->differentials.find(key);
  if (it != cache_->differentials.end()) return *it->second;
  const int rows = ambient_dim(k - 1, t);
  const int cols = ambient_dim(k, t);
  auto made = std::make_unique<ExactMatrix>(k <= lo_ || k > hi_ ? ExactMatrix(ctx_, rows, cols) : diff_fn_(k, t));
  if (made->rows() != rows || made->cols() != cols)
    throw std::logic_error("differential has the wrong shape at (" + std::to_string(k) + ", " + std::to_string(t) +
                           ")");
  const ExactMatrix& ref = *made;
  cache_->differentials.emplace(key, std::move(made));
  return ref;
}

HomologyData ChainComplexDW::homology(int k, int t) const {
  const ExactMatrix& in = differential(k + 1, t);
  const ExactMatrix& out = differential(k, t);
  return homology_at(&in, &term(k + 1, t), term(k, t), &out, &term(k - 1, t));
}

std::optional<std::pair<int, int>> ChainComplexDW::square_zero_failure(int degree_min, int degree_max) const {
  for (int t = degree_min; t <= degree_max; ++t)
    for (int k = lo_ + 2; k <= hi_; ++k)
      if (!(differential(k - 1, t) * differential(k, t)).is_zero()) return std::make_pair(k, t);
  return std::nullopt;
}

ChainComplexDW koszul_complex(const RegularSequence& seq, const GradedModule& m, const Window& window) {
  window.validate();
  if (!(m.ring() == seq.ring())) throw ValidationError("module and sequence live over different rings");
  const Coefficients& ctx = m.ring().ground();
  auto term = [seq, m, ctx](int k, int t) {
    KoszulLayout lay = koszul_layout(seq, m, k, t);
    std::vector<Span> nums, dens;
    for (int d : lay.degrees) {
      const auto& piece = m.piece(d);
      nums.push_back(piece.numerator);
      dens.push_back(piece.denominator);
    }
    return Term{direct_sum(ctx, nums), direct_sum(ctx, dens)};
  };
  auto diff = [seq, m, ctx](int k, int t) {
    KoszulLayout src = koszul_layout(seq, m, k, t);
    KoszulLayout tgt = koszul_layout(seq, m, k - 1, t);
    ExactMatrix d(ctx, tgt.dim, src.dim);
    for (std::size_t b = 0; b < src.sets.size(); ++b) {
      const IndexSet& set = src.sets[b];
      for (std::size_t l = 0; l < set.size(); ++l) {
        IndexSet rest = set;
        rest.erase(rest.begin() + static_cast<long>(l));
        const int tb = tgt.index.at(rest);
        d.add_block(tgt.offsets[u(tb)], src.offsets[b], m.multiplication(seq.element(set[l]), src.degrees[b]),
                    l % 2 == 0 ? Scalar(1) : Scalar(-1));
      }
    }
    return d;
  };
  auto label = [seq, m](int k, int t, const Vector& v) {
    KoszulLayout lay = koszul_layout(seq, m, k, t);
    std::string out;
    for (std::size_t b = 0; b < lay.sets.size(); ++b) {
      const int dim = m.ambient_dim(lay.degrees[b]);
      Vector part(v.begin() + lay.offsets[b], v.begin() + lay.offsets[b] + dim);
      if (is_zero_vector(part)) continue;
      if (!out.empty()) out += " + ";
      out += tensor_label(m.vector_to_string(part, lay.degrees[b]), index_set_label(lay.sets[b], "e"));
    }
    return out.empty() ? std::string("0") : out;
  };
  ChainComplexDW complex(ctx, 0, seq.size(), term, diff, label);
  if (auto bad = complex.square_zero_failure(window.degree_min, window.degree_max))
    throw NonSquareZero("Koszul differential d_" + std::to_string(bad->first - 1) + " d_" +
                        std::to_string(bad->first) + " is nonzero in degree " + std::to_string(bad->second));
  return complex;
}

Coefficients koszul_ground(const RegularSequence& seq) {
  const Coefficients& ctx = seq.ring().ground();
  if (ctx.is_field()) return ctx;
  const Monomial one(u(seq.ring().size()), 0);
  for (const auto& x : seq.elements())
    if (x.terms().size() == 1 && x.terms().begin()->first == one && ctx.valuation(x.terms().begin()->second) == 1)
      return Coefficients::prime_field(ctx.prime());
  return ctx;
}

ModuleShape over_ground(const ModuleShape& shape, const Coefficients& from, const Coefficients& to) {
  if (from == to) return shape;
  if (!to.is_field() || to.prime() != from.prime())
    throw Error("cannot rewrite a shape over " + from.describe() + " as one over " + to.describe());
  if (shape.free_rank > 0 || std::any_of(shape.torsion.begin(), shape.torsion.end(), [](int e) { return e != 1; }))
    throw Error("module " + shape.describe(from) + " is not an " + to.describe() + "-vector space");
  return ModuleShape{static_cast<int>(shape.torsion.size()), {}};
}

TorExtResult koszul_homology(const RegularSequence& seq, const GradedModule& m, const Window& window) {
  ChainComplexDW complex = koszul_complex(seq, m, window);
  const Coefficients ground = koszul_ground(seq);
  TorExtResult out{BigradedModule{ground, {}}, BigradedModule{ground, {}}, std::nullopt};
  for (int k = 0; k <= seq.size(); ++k)
    for (int t = window.degree_min; t <= window.degree_max; ++t) {
      if (complex.ambient_dim(k, t) == 0) continue;
      HomologyData h = complex.homology(k, t);
      if (h.homology.shape().is_zero()) continue;
      BigradedCell cell{over_ground(h.homology.shape(), complex.coefficients(), ground), {}};
      for (const auto& g : h.homology.generators()) cell.labels.push_back(complex.describe(k, t, g));
      out.tor.cells.emplace(std::make_pair(k, t), std::move(cell));
    }
  return out;
}

TorExtResult ext_groups(const RegularSequence& seq, const GradedModule& m, const Window& window) {
  window.validate();
  Window mirrored = window;
  mirrored.degree_min = -window.degree_max;
  mirrored.degree_max = -window.degree_min;
  TorExtResult out = koszul_homology(seq, m, mirrored);
  for (const auto& [key, cell] : out.tor.cells) {
    if (!cell.shape.torsion.empty())
      throw NotFreeError("Tor_{" + std::to_string(key.first) + "," + std::to_string(key.second) + "} = " +
                         cell.shape.describe(out.tor.ground) + " is not free; Ext is not its dual");
    BigradedCell dual{cell.shape, {}};
    for (const auto& l : cell.labels) dual.labels.push_back(dual_label(l));
    out.ext.cells.emplace(std::make_pair(key.first, -key.second), std::move(dual));
  }
  if (seq.size() > 0) out.extension = extension_certificate(seq, m.cap());
  return out;
}

ResolutionComplex::ResolutionComplex(RegularSequence sequence, int length)
    : sequence_(std::move(sequence)), residue_(residue_ring(sequence_)), length_(length) {
  if (length_ < 0) throw ValidationError("resolution length must be non-negative");
}

std::string ResolutionComplex::convention_note() {
  return "internal: delta(e_I (x) f) = sum_l (-1)^(l+1) e_(I - i_l) (x) x_(i_l) f; "
         "negated convention gives delta(e_j) = -{x_j}";
}

int ResolutionComplex::degree(const ResolutionBasis& b) const {
  int d = sequence_.monomial_degree(b.f);
  for (int j : b.e) d += sequence_.degree(j);
  return d + residue_.ring.degree(b.lambda);
}

std::vector<ResolutionBasis> ResolutionComplex::basis(int stage, int degree) const {
  std::vector<ResolutionBasis> out;
  if (stage < 0) return out;
  const auto fs = symmetric_monomials(sequence_.size(), stage);
  for (const auto& e : all_index_subsets(sequence_.size())) {
    int de = 0;
    for (int j : e) de += sequence_.degree(j);
    for (const auto& f : fs)
      for (auto& lambda : residue_.ring.monomials(degree - de - sequence_.monomial_degree(f)))
        out.push_back(ResolutionBasis{e, f, std::move(lambda)});
  }
  return out;
}

std::vector<ResolutionTerm> ResolutionComplex::delta_of(const ResolutionBasis& b, DeltaConvention convention) const {
  std::vector<ResolutionTerm> out;
  const int overall = convention == DeltaConvention::kAlternating ? 1 : -1;
  for (std::size_t l = 0; l < b.e.size(); ++l) {
    ResolutionBasis next = b;
    next.e.erase(next.e.begin() + static_cast<long>(l));
    next.f[u(b.e[l])] += 1;
    out.push_back(ResolutionTerm{Scalar(l % 2 == 0 ? overall : -overall), std::move(next)});
  }
  return out;
}

ExactMatrix ResolutionComplex::delta(int stage, int degree) const {
  const auto src = basis(stage, degree);
  const auto tgt = basis(stage + 1, degree);
  std::map<ResolutionBasis, int> index;
  for (std::size_t i = 0; i < tgt.size(); ++i) index.emplace(tgt[i], static_cast<int>(i));
  ExactMatrix d(ground(), static_cast<int>(tgt.size()), static_cast<int>(src.size()));
  for (std::size_t c = 0; c < src.size(); ++c)
    for (const auto& term : delta_of(src[c])) d.add_to(index.at(term.basis), static_cast<int>(c), term.coefficient);
  return d;
}

std::string ResolutionComplex::label(const ResolutionBasis& b) const {
  std::vector<std::string> parts;
  const std::string l = residue_.ring.monomial_to_string(b.lambda);
  if (l != "1") parts.push_back(l);
  if (!b.e.empty()) parts.push_back(index_set_label(b.e, "e"));
  if (std::any_of(b.f.begin(), b.f.end(), [](int x) { return x != 0; }))
    parts.push_back("{" + sequence_.monomial_label(b.f) + "}");
  if (parts.empty()) return "1";
  std::string out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out += "*" + parts[i];
  return out;
}

std::string ResolutionComplex::to_string(const std::vector<ResolutionTerm>& terms) const {
  std::string out;
  for (const auto& term : terms) {
    Scalar c = ground().normalize(term.coefficient);
    if (c == 0) continue;
    // Over F_p print p - 1 as -1.
    if (ground().is_finite() && c == ground().from_int(-1)) c = -1;
    const bool negative = c < 0;
    if (negative) c = -c;
    if (!out.empty()) out += negative ? " - " : " + ";
    else if (negative) out += "-";
    const std::string l = label(term.basis);
    if (c != 1) out += c.get_str() + (l == "1" ? "" : "*" + l);
    else out += l;
  }
  return out.empty() ? "0" : out;
}

ExactnessCertificate certify_resolution(const ResolutionComplex& complex, const Window& window) {
  window.validate();
  ExactnessCertificate cert{true, true, {}, std::nullopt};
  const Coefficients& ctx = complex.ground();
  auto fail = [&](const std::string& why) {
    if (!cert.failure) cert.failure = why;
  };
  for (int t = window.degree_min; t <= window.degree_max; ++t) {
    std::optional<ExactMatrix> previous;
    for (int s = 0; s <= complex.length(); ++s) {
      ExactMatrix d = complex.delta(s, t);
      if (d.cols() == 0) {
        previous = d;
        continue;
      }
      if (previous && !(d * *previous).is_zero()) {
        cert.square_zero = false;
        fail("delta^" + std::to_string(s) + " delta^" + std::to_string(s - 1) + " != 0 in degree " +
             std::to_string(t));
      }
      Span kernel = Span::from_vectors(ctx, d.cols(), kernel_image(d).kernel);
      Span image(ctx, d.cols());
      if (s == 0) {
        std::vector<Vector> units;
        const auto b = complex.basis(0, t);
        for (std::size_t i = 0; i < b.size(); ++i)
          if (b[i].e.empty()) units.push_back(unit_vector(d.cols(), static_cast<int>(i)));
        image = Span::from_vectors(ctx, d.cols(), units);
      } else {
        image = Span::from_matrix_columns(*previous);
      }
      ExactnessRecord rec{s, t, image.size(), kernel.size(), kernel == image};
      if (!rec.exact) {
        cert.exact = false;
        fail(s == 0 ? "kernel of delta^0 differs from L in degree " + std::to_string(t)
                    : "not exact at stage " + std::to_string(s) + " in degree " + std::to_string(t));
      }
      cert.records.push_back(rec);
      previous = std::move(d);
    }
  }
  return cert;
}

ResolutionComplex relative_injective_resolution(const GradedRing& ring, const RegularSequence& seq,
                                                std::optional<int> length, const Window& window) {
  window.validate();
  if (!(seq.ring() == ring)) throw ValidationError("sequence does not live over " + ring.describe());
  const int ell = length.value_or(window.max_filtration + 1);
  auto report = regularity_check(GradedModule::cyclic(ring, {}, truncation_cap(seq, ell)), seq, window);
  if (!report.regular) throw NonRegular(report.summary());
  ResolutionComplex complex(seq, ell);
  complex.set_certificate(certify_resolution(complex, window));
  return complex;
}

}  // namespace hbss
