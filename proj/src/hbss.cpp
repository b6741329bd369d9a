#include "hbss/hbss.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "hbss/errors.hpp"
#include "hbss/koszul.hpp"

namespace hbss {
namespace {

inline std::size_t u(int i) { return static_cast<std::size_t>(i); }

std::string at(int s, int t) { return "(" + std::to_string(s) + ", " + std::to_string(t) + ")"; }

// Runs fn(i) for i in [lo, hi] on a small worker pool; rethrows the first failure.
template <class Fn>
void parallel_for(int lo, int hi, Fn fn) {
  if (hi < lo) return;
  const int count = hi - lo + 1;
  const int workers = std::max(1, std::min<int>(count, static_cast<int>(std::thread::hardware_concurrency())));
  std::atomic<int> next{lo};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (int i = next++; i <= hi; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = hi + 1;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

ModuleShape display_shape(const ModuleShape& shape, const Coefficients& from, const Coefficients& to) {
  return from == to ? shape : over_ground(shape, from, to);
}

std::string factor_label(const std::string& text) {
  return text.find_first_of("+-", 1) != std::string::npos ? "(" + text + ")" : text;
}

std::string product_label(const std::string& left, const std::string& right) {
  if (left.empty() || left == "1") return right;
  if (right == "1") return left;
  return factor_label(left) + "*" + factor_label(right);
}

std::string join_terms(const std::vector<std::string>& terms) {
  if (terms.empty()) return "0";
  std::string out = terms.front();
  for (std::size_t i = 1; i < terms.size(); ++i) {
    if (!terms[i].empty() && terms[i][0] == '-') out += " - " + terms[i].substr(1);
    else out += " + " + terms[i];
  }
  return out;
}

// Span of p^{o_i} e_i in R^g.
Span order_relations(const Coefficients& ctx, const std::vector<int>& orders) {
  const int g = static_cast<int>(orders.size());
  std::vector<Vector> gens;
  for (int i = 0; i < g; ++i)
    if (orders[u(i)] >= 0) {
      Vector v = zero_vector(g);
      v[u(i)] = ctx.prime_power(orders[u(i)]);
      gens.push_back(std::move(v));
    }
  return Span::from_vectors(ctx, g, gens);
}

Term coordinate_term(const Coefficients& ctx, const Cell& cell) {
  return Term{Span::whole(ctx, cell.size()), order_relations(ctx, cell.orders)};
}

Vector reduce_coordinates(const Coefficients& ctx, Vector v, const std::vector<int>& orders) {
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = orders[i] > 0 ? ctx.reduce_mod_prime_power(v[i], orders[i]) : ctx.normalize(v[i]);
  return v;
}

// Cell from a subquotient of an ambient module; labels from the ambient labeler.
template <class Labeler>
Cell ambient_cell(int s, int t, Subquotient q, const Coefficients& coords, const Coefficients& display,
                  Labeler&& label) {
  Cell cell;
  cell.s = s;
  cell.t = t;
  cell.shape = display_shape(q.shape(), coords, display);
  cell.orders = q.orders();
  cell.representatives = q.generators();
  for (const auto& v : cell.representatives) cell.labels.push_back(label(v));
  cell.map = std::make_shared<CoordinateMap>(CoordinateMap{std::move(q), nullptr});
  return cell;
}

Differential differential_from(int r, const Cell& src, const Cell& tgt, const ExactMatrix& ambient,
                               const Coefficients& coords) {
  std::vector<Vector> columns;
  for (const auto& rep : src.representatives) {
    auto c = tgt.coordinates(ambient.apply(rep));
    if (!c)
      throw MembershipError("d_" + std::to_string(r) + " from " + at(src.s, src.t) + " leaves the cycles at " +
                            at(tgt.s, tgt.t));
    columns.push_back(std::move(*c));
  }
  return Differential{r, {src.s, src.t}, {tgt.s, tgt.t}, ExactMatrix::from_columns(coords, tgt.size(), columns)};
}

// ---------------------------------------------------------------------------
// Comodule mode: ambient of E_1^{s,t} is ⊕_{|μ|=s} M_{t-|x^μ|}.

struct SymLayout {
  std::vector<Monomial> monomials;
  std::vector<int> degrees;
  std::vector<int> offsets;
  std::map<Monomial, int> block;
  int dim = 0;
};

SymLayout sym_layout(const RegularSequence& seq, const GradedModule& m, int s, int t) {
  SymLayout lay;
  for (const auto& mu : symmetric_monomials(seq.size(), s)) {
    lay.block.emplace(mu, static_cast<int>(lay.monomials.size()));
    lay.monomials.push_back(mu);
    lay.degrees.push_back(t - seq.monomial_degree(mu));
    lay.offsets.push_back(lay.dim);
    lay.dim += m.ambient_dim(lay.degrees.back());
  }
  return lay;
}

// ---------------------------------------------------------------------------
// Filtered mode: V_t = ⊕_k ⊕_{|J|=k} T_{t-k-|f_J|-g} u_J for the Koszul
// resolution of T/(f) (g the generator degree), filtered by I^s.

struct Block {
  int k;
  IndexSet set;
  int degree;
  int offset;
};

struct TotalDegree {
  std::vector<Block> blocks;
  std::map<IndexSet, int> index;
  int dim = 0;
  std::optional<ExactMatrix> d;  // V_t -> V_{t-1}
  std::vector<Span> filtration;  // F^0 .. F^{top}
};

}  // namespace

namespace detail {

class FilteredModel {
 public:
  FilteredModel(const GradedModule& module, const RegularSequence& seq, const Window& w)
      : seq_(seq), window_(w), ctx_(seq.ring().ground()) {
    if (!(module.ring() == seq.ring())) throw ValidationError("module and sequence live over different rings");
    if (module.generators().size() != 1 || module.numerator())
      throw ValidationError("filtered mode needs a cyclic module T/(f_1, ..., f_m)");
    gen_degree_ = module.generators()[0].degree;
    std::vector<Polynomial> rels;
    for (const auto& rel : module.relations()) {
      if (rel[0].is_zero()) continue;
      rels.push_back(rel[0]);
    }
    cap_ = truncation_cap(seq, w.max_filtration + 1);
    t_ = GradedModule::cyclic(seq.ring(), {}, cap_);
    regularity_ = regularity_check(t_, seq, w);
    if (!regularity_.regular) throw NonRegular("sequence: " + regularity_.summary());
    if (!rels.empty()) {
      relations_.emplace(seq.ring(), rels);
      auto rr = regularity_check(t_, *relations_, w);
      if (!rr.regular) throw NonRegular("relations of the input module: " + rr.summary());
    }
    top_ = w.max_filtration + 2;
    for (int s = 0; s <= top_; ++s) powers_.push_back(ideal_power_module(seq, s, cap_));
    lo_ = w.degree_min - 2;
    hi_ = w.degree_max + 2;
    data_.resize(u(hi_ - lo_ + 1));
    for (int t = lo_; t <= hi_; ++t) layout(t);
    parallel_for(lo_, hi_, [this](int t) { fill(t); });
  }

  const RegularityReport& regularity() const { return regularity_; }
  const Coefficients& ctx() const { return ctx_; }
  const GradedModule& ring_module() const { return t_; }
  int lo() const { return lo_; }
  int hi() const { return hi_; }
  const TotalDegree& at(int t) const { return data_[u(t - lo_)]; }
  /// F^s in V_t, F^s = F^level for s >= level.
  const Span& f(int s, int t, int level) const {
    const auto& fil = at(t).filtration;
    return fil[u(std::clamp(s, 0, level))];
  }

  std::string label(int t, const Vector& v) const {
    const TotalDegree& td = at(t);
    std::vector<std::string> terms;
    for (const auto& b : td.blocks) {
      const int n = t_.ambient_dim(b.degree);
      Vector part(v.begin() + b.offset, v.begin() + b.offset + n);
      if (is_zero_vector(part)) continue;
      terms.push_back(product_label(t_.vector_to_string(part, b.degree), b.set.empty() ? "1" : index_set_label(b.set, "u")));
    }
    return join_terms(terms);
  }

  Vector vector_of(const Polynomial& c, const IndexSet& set, int t) const {
    if (t < lo_ || t > hi_) throw WindowTooSmall("total degree " + std::to_string(t) + " is outside the realized range");
    const TotalDegree& td = at(t);
    auto it = td.index.find(set);
    if (it == td.index.end()) throw ValidationError("no Koszul generator u_J for that index set");
    const Block& b = td.blocks[u(it->second)];
    Vector out = zero_vector(td.dim);
    Vector part = t_.vector_of(FreeElement{c}, b.degree);
    std::copy(part.begin(), part.end(), out.begin() + b.offset);
    return out;
  }

  /// Multiplication by x: V_t -> V_{t+|x|}, both inside the realized range.
  ExactMatrix multiplication(const Polynomial& x, int dx, int t) const {
    const TotalDegree& src = at(t);
    const TotalDegree& tgt = at(t + dx);
    ExactMatrix out(ctx_, tgt.dim, src.dim);
    for (const auto& b : src.blocks) {
      const Block& c = tgt.blocks[u(tgt.index.at(b.set))];
      out.add_block(c.offset, b.offset, t_.multiplication(x, b.degree));
    }
    return out;
  }

 private:
  int relation_count() const { return relations_ ? relations_->size() : 0; }

  void layout(int t) {
    TotalDegree& td = data_[u(t - lo_)];
    for (const auto& set : all_index_subsets(relation_count())) {
      int df = 0;
      for (int j : set) df += relations_->degree(j);
      const int k = static_cast<int>(set.size());
      const int d = t - k - df - gen_degree_;
      td.index.emplace(set, static_cast<int>(td.blocks.size()));
      td.blocks.push_back(Block{k, set, d, td.dim});
      td.dim += t_.ambient_dim(d);
    }
  }

  void fill(int t) {
    TotalDegree& td = data_[u(t - lo_)];
    for (int s = 0; s <= top_; ++s) {
      if (s == 0) {
        td.filtration.push_back(Span::whole(ctx_, td.dim));
        continue;
      }
      std::vector<Span> parts;
      for (const auto& b : td.blocks) parts.push_back(powers_[u(s)].piece(b.degree).numerator);
      td.filtration.push_back(direct_sum(ctx_, parts));
    }
    if (t == lo_) {
      td.d = ExactMatrix(ctx_, 0, td.dim);
      return;
    }
    const TotalDegree& below = data_[u(t - 1 - lo_)];
    td.d = ExactMatrix(ctx_, below.dim, td.dim);
    for (const auto& b : td.blocks)
      for (std::size_t l = 0; l < b.set.size(); ++l) {
        IndexSet rest = b.set;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(l));
        const Block& c = below.blocks[u(below.index.at(rest))];
        const Polynomial& x = relations_->element(b.set[l]);
        td.d->add_block(c.offset, b.offset, t_.multiplication(x, b.degree), Scalar(l % 2 == 0 ? 1 : -1));
      }
  }

  RegularSequence seq_;
  Window window_;
  Coefficients ctx_;
  int gen_degree_ = 0;
  std::optional<int> cap_;
  GradedModule t_ = GradedModule::cyclic(seq_.ring(), {});
  std::optional<RegularSequence> relations_;
  RegularityReport regularity_;
  int top_ = 0;
  std::vector<GradedModule> powers_;
  int lo_ = 0;
  int hi_ = 0;
  std::vector<TotalDegree> data_;
};

}  // namespace detail

namespace {

using detail::FilteredModel;

Abutment abutment_at_level(const FilteredModel& model, const Window& w, int level, const Coefficients& display) {
  Abutment out(display);
  out.truncation = level;
  const Coefficients& ctx = model.ctx();
  std::mutex mutex;
  parallel_for(w.degree_min, w.degree_max, [&](int t) {
    const TotalDegree& here = model.at(t);
    const Span& k = model.f(level, t, level);
    Span cycles = Span::preimage(*here.d, model.f(level, t - 1, level));
    Span bounds = Span::whole(ctx, model.at(t + 1).dim).image(*model.at(t + 1).d) + k;
    ModuleShape total = Subquotient::of(cycles, bounds).shape();
    std::map<Bidegree, ModuleShape> graded;
    int free_sum = 0, length_sum = 0;
    for (int s = 0; s < level; ++s) {
      Span num = cycles.intersect(model.f(s, t, level)) + bounds;
      Span den = cycles.intersect(model.f(s + 1, t, level)) + bounds;
      ModuleShape g = Subquotient::of(num, den).shape();
      free_sum += g.free_rank;
      length_sum += g.torsion_length();
      if (!g.is_zero()) graded[{s, t}] = display_shape(g, ctx, display);
    }
    bool ok = free_sum == total.free_rank && (total.free_rank > 0 || length_sum == total.torsion_length());
    std::lock_guard<std::mutex> lock(mutex);
    if (!total.is_zero()) out.total[t] = total;
    out.graded.insert(graded.begin(), graded.end());
    out.consistent = out.consistent && ok;
  });
  return out;
}

Abutment abutment_of(const FilteredModel& model, const Window& w, const Coefficients& display) {
  const int level = w.max_filtration + 1;
  Abutment a = abutment_at_level(model, w, level, display);
  Abutment b = abutment_at_level(model, w, level + 1, display);
  for (int s = 0; s < level; ++s)
    for (int t = w.degree_min; t <= w.degree_max; ++t) {
      auto x = a.graded.find({s, t});
      auto y = b.graded.find({s, t});
      ModuleShape sx = x == a.graded.end() ? ModuleShape{} : x->second;
      ModuleShape sy = y == b.graded.end() ? ModuleShape{} : y->second;
      a.stable[{s, t}] = sx == sy;
    }
  return a;
}

std::string coefficient_label(const Coefficients& ctx, const Scalar& c, const std::string& label) {
  if (c == 1) return label;
  if (c == -1) return "-" + factor_label(label);
  return ctx.to_string(c) + "*" + factor_label(label);
}

}  // namespace

std::optional<Vector> CoordinateMap::coordinates(const Vector& ambient) const {
  Vector x = ambient;
  if (parent) {
    auto c = parent->coordinates(ambient);
    if (!c) return std::nullopt;
    x = std::move(*c);
  }
  if (!quotient.numerator().contains(x)) return std::nullopt;
  return quotient.coordinates(x);
}

std::optional<Vector> Cell::coordinates(const Vector& ambient) const {
  if (!map) return std::nullopt;
  return map->coordinates(ambient);
}

const Cell* Page::cell(int s, int t) const {
  auto it = cells.find({s, t});
  return it == cells.end() ? nullptr : &it->second;
}

const Differential* Page::differential(Bidegree from) const {
  for (const auto& d : differentials)
    if (d.from == from) return &d;
  return nullptr;
}

int Page::masked_count() const {
  int n = 0;
  for (const auto& [key, c] : cells) n += c.masked ? 1 : 0;
  return n;
}

Page e1_from_comodule(const RegularSequence& seq, const BocksteinComodule& comodule, const Window& w) {
  w.validate();
  const ResidueRing l = residue_ring(seq);
  const GradedModule& m = comodule.module();
  if (!(m.ring() == l.ring))
    throw ValidationError("the comodule must live over the residue ring " + l.ring.describe() + ", not " +
                          m.ring().describe());
  if (comodule.size() != seq.size())
    throw ValidationError("the comodule has " + std::to_string(comodule.size()) + " operators for a sequence of length " +
                          std::to_string(seq.size()));
  for (int j = 0; j < seq.size(); ++j)
    if (comodule.x_degree(j) != seq.degree(j))
      throw ValidationError("Q" + std::to_string(j) + " has degree " + std::to_string(comodule.operator_degree(j)) +
                            ", expected " + std::to_string(seq.degree(j) + 1));
  Window check = w;
  check.degree_min -= 2;
  check.degree_max += 2;
  ComoduleCertificate cert = validate_comodule(comodule, check);
  if (!cert.valid) throw ValidationError("comodule: " + cert.summary());

  const Coefficients& ctx = l.ring.ground();
  Page page(1, ctx, ctx);
  page.s_min = 0;
  page.s_max = w.max_filtration + 1;
  page.t_min = w.degree_min - 1;
  page.t_max = w.degree_max + 1;

  std::map<Bidegree, SymLayout> layouts;
  for (int s = page.s_min; s <= page.s_max; ++s)
    for (int t = page.t_min; t <= page.t_max; ++t) layouts.emplace(Bidegree{s, t}, sym_layout(seq, m, s, t));

  std::mutex mutex;
  parallel_for(page.t_min, page.t_max, [&](int t) {
    for (int s = page.s_min; s <= page.s_max; ++s) {
      const SymLayout& lay = layouts.at({s, t});
      std::vector<Span> nums, dens;
      for (int d : lay.degrees) {
        nums.push_back(m.piece(d).numerator);
        dens.push_back(m.piece(d).denominator);
      }
      auto label = [&](const Vector& v) {
        std::vector<std::string> terms;
        for (std::size_t b = 0; b < lay.monomials.size(); ++b) {
          const int n = m.ambient_dim(lay.degrees[b]);
          Vector part(v.begin() + lay.offsets[b], v.begin() + lay.offsets[b] + n);
          if (is_zero_vector(part)) continue;
          terms.push_back(product_label(seq.monomial_label(lay.monomials[b]), m.vector_to_string(part, lay.degrees[b])));
        }
        return join_terms(terms);
      };
      Cell cell = ambient_cell(s, t, Subquotient::of(direct_sum(ctx, nums), direct_sum(ctx, dens)), ctx, ctx, label);
      std::lock_guard<std::mutex> lock(mutex);
      page.cells.emplace(Bidegree{s, t}, std::move(cell));
    }
  });

  std::vector<Differential> diffs;
  for (int s = page.s_min; s < page.s_max; ++s)
    for (int t = page.t_min + 1; t <= page.t_max; ++t) {
      const Cell& src = page.cells.at({s, t});
      const Cell& tgt = page.cells.at({s + 1, t - 1});
      if (src.is_zero() || tgt.is_zero()) continue;
      const SymLayout& a = layouts.at({s, t});
      const SymLayout& b = layouts.at({s + 1, t - 1});
      ExactMatrix d1(ctx, b.dim, a.dim);
      for (std::size_t blk = 0; blk < a.monomials.size(); ++blk)
        for (int j = 0; j < seq.size(); ++j) {
          Monomial next = a.monomials[blk];
          next[u(j)] += 1;
          d1.add_block(b.offsets[u(b.block.at(next))], a.offsets[blk], comodule.operator_matrix(j, a.degrees[blk]));
        }
      diffs.push_back(differential_from(1, src, tgt, d1, ctx));
    }
  page.differentials = std::move(diffs);
  return page;
}

Page turn_page(const Page& page) { return turn_page(page, page.differentials); }

Page turn_page(const Page& page, const std::vector<Differential>& differentials) {
  const Coefficients& ctx = page.coordinates;
  std::map<Bidegree, const Differential*> by_source;
  int r = page.r;
  for (const auto& d : differentials) {
    by_source[d.from] = &d;
    r = d.r;
    if (d.to.first != d.from.first + d.r || d.to.second != d.from.second - 1)
      throw ValidationError("differential from " + at(d.from.first, d.from.second) + " has the wrong bidegree");
  }
  Page out(r + 1, page.ground, page.coordinates);
  out.s_min = page.s_min;
  out.s_max = page.s_max;
  out.t_min = page.t_min;
  out.t_max = page.t_max;
  out.permanent = page.permanent;

  // Partner state: nullopt when unknown (masked or outside the page).
  auto partner = [&](int s, int t) -> std::optional<const Cell*> {
    if (s < 0) return static_cast<const Cell*>(nullptr);
    if (!page.in_region(s, t)) return std::nullopt;
    const Cell* c = page.cell(s, t);
    if (c == nullptr) return static_cast<const Cell*>(nullptr);
    if (c->masked) return std::nullopt;
    return c;
  };

  for (const auto& [key, cell] : page.cells) {
    const auto [s, t] = key;
    Cell next;
    next.s = s;
    next.t = t;
    auto in = partner(s - r, t + 1);
    auto outp = partner(s + r, t - 1);
    if (cell.masked || !in || !outp) {
      next.masked = true;
      next.shape = cell.shape;
      out.cells.emplace(key, std::move(next));
      continue;
    }
    if (cell.is_zero()) {
      out.cells.emplace(key, std::move(next));
      continue;
    }
    Term here = coordinate_term(ctx, cell);
    std::optional<ExactMatrix> din, dout;
    std::optional<Term> src, tgt;
    if (*in && !(*in)->is_zero()) {
      auto it = by_source.find({s - r, t + 1});
      din = it != by_source.end() ? it->second->matrix : ExactMatrix(ctx, cell.size(), (*in)->size());
      src = coordinate_term(ctx, **in);
    }
    if (*outp && !(*outp)->is_zero()) {
      auto it = by_source.find(key);
      dout = it != by_source.end() ? it->second->matrix : ExactMatrix(ctx, (*outp)->size(), cell.size());
      tgt = coordinate_term(ctx, **outp);
    }
    if (din && dout) {
      ExactMatrix sq = *dout * *din;
      for (int j = 0; j < sq.cols(); ++j)
        if (!tgt->denominator.contains(sq.column(j)))
          throw NonSquareZero("d_" + std::to_string(r) + " d_" + std::to_string(r) + " != 0 through " + at(s, t) +
                              ": generator " + std::to_string(j) + " of " + at(s - r, t + 1) + " ('" +
                              (*in)->labels[u(j)] + "') maps to a nonzero class in " + at(s + r, t - 1));
    }
    HomologyData h = homology_at(din ? &*din : nullptr, src ? &*src : nullptr, here, dout ? &*dout : nullptr,
                                 tgt ? &*tgt : nullptr);
    const Subquotient& q = h.homology;
    next.shape = display_shape(q.shape(), ctx, page.ground);
    next.orders = q.orders();
    for (const auto& g : q.generators()) {
      Vector rep;
      std::vector<std::string> terms;
      for (int i = 0; i < cell.size(); ++i) {
        if (g[u(i)] == 0) continue;
        const Vector& old = cell.representatives[u(i)];
        if (rep.empty()) rep = zero_vector(static_cast<int>(old.size()));
        for (std::size_t a = 0; a < old.size(); ++a) rep[a] += g[u(i)] * old[a];
        terms.push_back(coefficient_label(ctx, g[u(i)], cell.labels[u(i)]));
      }
      for (auto& x : rep) x = ctx.normalize(x);
      next.representatives.push_back(std::move(rep));
      next.labels.push_back(join_terms(terms));
    }
    next.map = std::make_shared<CoordinateMap>(CoordinateMap{q, cell.map});
    out.cells.emplace(key, std::move(next));
  }
  return out;
}

Abutment filtered_abutment(const GradedModule& module, const RegularSequence& seq, const Window& w) {
  w.validate();
  FilteredModel model(module, seq, w);
  return abutment_of(model, w, koszul_ground(seq));
}

FilteredResult filtered_ss(const GradedModule& module, const RegularSequence& seq, const Window& w) {
  w.validate();
  auto shared = std::make_shared<FilteredModel>(module, seq, w);
  const FilteredModel& model = *shared;
  const Coefficients& ctx = model.ctx();
  const Coefficients display = koszul_ground(seq);
  const int level = w.max_filtration + 1;
  FilteredResult res{shared, {}, Abutment(display), {}, {}, model.regularity()};

  // Z_r^s in V_t, cached per t; each worker only touches its own column.
  const int lo = w.degree_min, hi = w.degree_max;
  std::vector<std::map<std::pair<int, int>, Span>> zcache(u(hi - lo + 1));
  auto z = [&](int r, int s, int t) -> const Span& {
    auto& cache = zcache[u(t - lo)];
    auto key = std::make_pair(r, s);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    Span value = r == 0 ? model.f(s, t, level)
                        : model.f(s, t, level).intersect(
                              Span::preimage(*model.at(t).d, model.f(std::min(s + r, level), t - 1, level)));
    return cache.emplace(key, std::move(value)).first->second;
  };

  for (int r = 1; r <= w.max_page; ++r) {
    Page page(r, display, ctx);
    page.s_min = 0;
    page.s_max = w.max_filtration;
    page.t_min = lo;
    page.t_max = hi;
    std::mutex mutex;
    parallel_for(lo, hi, [&](int t) {
      std::vector<Cell> column;
      for (int s = 0; s <= w.max_filtration; ++s) {
        const Span& num = z(r, s, t);
        Span image = model.f(s - r + 1, t + 1, level).image(*model.at(t + 1).d) + model.f(level, t, level);
        Span den = z(r - 1, s + 1, t) + model.f(s, t, level).intersect(image);
        Cell cell = ambient_cell(s, t, Subquotient::of(num, den), ctx, display,
                                 [&](const Vector& v) { return model.label(t, v); });
        cell.masked = s + r > level;
        column.push_back(std::move(cell));
      }
      std::lock_guard<std::mutex> lock(mutex);
      for (auto& c : column) page.cells.emplace(Bidegree{c.s, c.t}, std::move(c));
    });
    for (const auto& [key, src] : page.cells) {
      const Cell* tgt = page.cell(key.first + r, key.second - 1);
      if (tgt == nullptr || src.masked || tgt->masked || src.is_zero() || tgt->is_zero()) continue;
      page.differentials.push_back(differential_from(r, src, *tgt, *model.at(key.second).d, ctx));
    }

    LinearityObservation lin;
    lin.r = r;
    for (const auto& d : page.differentials) {
      const Cell& src = page.cells.at(d.from);
      for (int j = 0; j < seq.size() && lin.linear; ++j) {
        const int dx = seq.degree(j);
        const Cell* src2 = page.cell(d.from.first + 1, d.from.second + dx);
        const Cell* tgt2 = page.cell(d.to.first + 1, d.to.second + dx);
        if (src2 == nullptr || tgt2 == nullptr || src2->masked || tgt2->masked) continue;
        const Differential* d2 = page.differential({src2->s, src2->t});
        ExactMatrix mult = model.multiplication(seq.element(j), dx, d.from.second);
        ExactMatrix mult_below = model.multiplication(seq.element(j), dx, d.to.second);
        for (const auto& rep : src.representatives) {
          auto a = src2->coordinates(mult.apply(rep));
          auto b = tgt2->coordinates(mult_below.apply(model.at(d.from.second).d->apply(rep)));
          if (!a || !b) continue;
          ++lin.checks;
          Vector lhs = d2 ? reduce_coordinates(ctx, d2->matrix.apply(*a), tgt2->orders) : zero_vector(tgt2->size());
          if (lhs != *b) {
            lin.linear = false;
            lin.first_failure = "d_" + std::to_string(r) + "(x" + std::to_string(j) + " * class of " + at(src.s, src.t) +
                                ") differs from x" + std::to_string(j) + " * d_" + std::to_string(r);
            break;
          }
        }
      }
    }
    res.linearity.push_back(std::move(lin));
    res.pages.push_back(std::move(page));
  }

  for (std::size_t i = 0; i + 1 < res.pages.size(); ++i) {
    Page turned = turn_page(res.pages[i]);
    TurnCheck check;
    check.r = res.pages[i].r;
    for (const auto& [key, c] : turned.cells) {
      const Cell* direct = res.pages[i + 1].cell(key.first, key.second);
      if (c.masked || direct == nullptr || direct->masked) continue;
      ++check.compared;
      if (c.shape != direct->shape)
        check.mismatches.push_back("E_" + std::to_string(check.r + 1) + at(key.first, key.second) + ": " +
                                   c.shape.describe(display) + " from d_" + std::to_string(check.r) + ", " +
                                   direct->shape.describe(display) + " directly");
    }
    res.turn_checks.push_back(std::move(check));
  }
  res.abutment = abutment_of(model, w, display);
  return res;
}

Vector FilteredResult::vector_of(const Polynomial& c, const IndexSet& relations, int t) const {
  return model->vector_of(c, relations, t);
}

ParityCertificate parity_collapse_check(const Page& page) {
  ParityCertificate cert;
  for (const auto& [key, cell] : page.cells) {
    if (cell.masked || cell.shape.is_zero()) continue;
    ++cert.checked;
    if (key.second % 2 != 0) {
      cert.odd_cell = key;
      return cert;
    }
  }
  cert.collapsed = true;
  return cert;
}

AbutmentReport abutment_compare(const std::vector<Page>& pages, const Abutment& abutment) {
  AbutmentReport rep;
  if (pages.empty()) return rep;
  const Page& last = pages.back();
  for (const auto& d : last.differentials)
    if (!d.matrix.is_zero()) rep.last_page_stable = false;
  for (const auto& [key, cell] : last.cells) {
    auto stable = abutment.stable.find(key);
    if (stable == abutment.stable.end()) continue;
    if (cell.masked) {
      ++rep.masked_excluded;
      continue;
    }
    if (!stable->second) {
      ++rep.unstable_excluded;
      continue;
    }
    ++rep.compared;
    auto it = abutment.graded.find(key);
    ModuleShape target = it == abutment.graded.end() ? ModuleShape{} : it->second;
    if (cell.shape != target) {
      rep.matches = false;
      rep.discrepancies.push_back(AbutmentDiscrepancy{key.first, key.second, cell.shape, target});
    }
  }
  return rep;
}

}  // namespace hbss
