#include "hbss/exterior.hpp"

#include <algorithm>
#include <functional>

#include "hbss/errors.hpp"

namespace hbss {
namespace {

inline std::size_t u(int i) { return static_cast<std::size_t>(i); }

void accumulate(ExteriorElement& out, const IndexSet& set, const Scalar& c) {
  auto it = out.find(set);
  Scalar v = (it == out.end() ? Scalar(0) : it->second) + c;
  if (v == 0) {
    if (it != out.end()) out.erase(it);
  } else if (it == out.end()) {
    out.emplace(set, v);
  } else {
    it->second = v;
  }
}

std::string y_label(const Monomial& mu) {
  std::string out;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    if (mu[j] == 0) continue;
    if (!out.empty()) out += "*";
    out += "y" + std::to_string(j);
    if (mu[j] != 1) out += "^" + std::to_string(mu[j]);
  }
  return out;
}

std::string tensor_label(const std::string& prefix, const std::string& element) {
  if (prefix.empty()) return element;
  if (element == "1") return prefix;
  if (element.find_first_of("+-", 1) != std::string::npos) return prefix + "*(" + element + ")";
  return prefix + "*" + element;
}

// One bidegree of M ⊗ Sym(y): blocks M_{t - |y^mu|}, one per monomial mu.
struct SymTerm {
  std::vector<Monomial> monomials;
  std::vector<int> degrees;
  std::vector<int> offsets;
  std::map<Monomial, int> block;
  Term term;
  int dim = 0;
};

SymTerm sym_term(const BocksteinComodule& m, int s, int t) {
  const GradedModule& mod = m.module();
  const Coefficients& ctx = mod.ring().ground();
  SymTerm out{{}, {}, {}, {}, Term{Span(ctx, 0), Span(ctx, 0)}, 0};
  if (s < 0) return out;
  std::vector<Span> nums, dens;
  for (const auto& mu : symmetric_monomials(m.size(), s)) {
    int dmu = 0;
    for (int j = 0; j < m.size(); ++j) dmu += mu[u(j)] * m.x_degree(j);
    const auto& piece = mod.piece(t - dmu);
    out.block.emplace(mu, static_cast<int>(out.monomials.size()));
    out.monomials.push_back(mu);
    out.degrees.push_back(t - dmu);
    out.offsets.push_back(out.dim);
    out.dim += static_cast<int>(piece.basis.size());
    nums.push_back(piece.numerator);
    dens.push_back(piece.denominator);
  }
  out.term = Term{direct_sum(ctx, nums), direct_sum(ctx, dens)};
  return out;
}

// Σ_j Q_j ⊗ y_j from bidegree (s, t) to (s + 1, t - 1).
ExactMatrix sym_differential(const BocksteinComodule& m, const SymTerm& src, const SymTerm& tgt) {
  ExactMatrix d(m.module().ring().ground(), tgt.dim, src.dim);
  for (std::size_t b = 0; b < src.monomials.size(); ++b)
    for (int j = 0; j < m.size(); ++j) {
      Monomial next = src.monomials[b];
      next[u(j)] += 1;
      int tb = tgt.block.at(next);
      d.add_block(tgt.offsets[u(tb)], src.offsets[b], m.operator_matrix(j, src.degrees[b]));
    }
  return d;
}

}  // namespace

std::optional<SignedIndexSet> wedge(const IndexSet& a, const IndexSet& b) {
  SignedIndexSet out;
  std::size_t i = 0, k = 0;
  int swaps = 0;
  while (i < a.size() || k < b.size()) {
    if (k == b.size() || (i < a.size() && a[i] < b[k])) {
      out.set.push_back(a[i++]);
    } else if (i == a.size() || b[k] < a[i]) {
      // b[k] moves past every remaining element of a.
      swaps += static_cast<int>(a.size() - i);
      out.set.push_back(b[k++]);
    } else {
      return std::nullopt;
    }
  }
  out.sign = swaps % 2 == 0 ? 1 : -1;
  return out;
}

std::vector<IndexSet> index_subsets(int n, int k) {
  std::vector<IndexSet> out;
  if (k < 0 || k > n) return out;
  IndexSet cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

std::vector<IndexSet> all_index_subsets(int n) {
  std::vector<IndexSet> out;
  for (int k = 0; k <= n; ++k)
    for (auto& s : index_subsets(n, k)) out.push_back(std::move(s));
  return out;
}

std::vector<IndexSet> all_index_subsets(const IndexSet& pool) {
  std::vector<IndexSet> out;
  for (const auto& local : all_index_subsets(static_cast<int>(pool.size()))) {
    IndexSet s;
    for (int i : local) s.push_back(pool[u(i)]);
    out.push_back(std::move(s));
  }
  return out;
}

std::string index_set_label(const IndexSet& set, const std::string& symbol) {
  if (set.empty()) return "1";
  std::string out;
  for (int i : set) out += symbol + std::to_string(i);
  return out;
}

ExteriorElement exterior_monomial(const IndexSet& set, const Scalar& coefficient) {
  for (std::size_t i = 1; i < set.size(); ++i)
    if (set[i - 1] >= set[i]) throw std::invalid_argument("index set must be strictly ascending");
  ExteriorElement out;
  if (coefficient != 0) out.emplace(set, coefficient);
  return out;
}

ExteriorElement wedge(const ExteriorElement& a, const ExteriorElement& b) {
  ExteriorElement out;
  for (const auto& [sa, ca] : a)
    for (const auto& [sb, cb] : b)
      if (auto w = wedge(sa, sb)) accumulate(out, w->set, ca * cb * w->sign);
  return out;
}

ExteriorElement partial_derivation(int j, const ExteriorElement& element) {
  ExteriorElement out;
  for (const auto& [set, c] : element) {
    auto it = std::find(set.begin(), set.end(), j);
    if (it == set.end()) continue;
    const auto pos = it - set.begin();
    IndexSet rest = set;
    rest.erase(rest.begin() + pos);
    accumulate(out, rest, pos % 2 == 0 ? c : Scalar(-c));
  }
  return out;
}

std::string exterior_to_string(const ExteriorElement& element, const std::string& symbol) {
  if (element.empty()) return "0";
  std::vector<IndexSet> order;
  for (const auto& [s, c] : element) order.push_back(s);
  std::stable_sort(order.begin(), order.end(),
                   [](const IndexSet& a, const IndexSet& b) { return a.size() < b.size(); });
  std::string out;
  for (const auto& s : order) {
    Scalar c = element.at(s);
    const bool negative = c < 0;
    if (negative) c = -c;
    if (!out.empty()) out += negative ? " - " : " + ";
    else if (negative) out += "-";
    const std::string mono = index_set_label(s, symbol);
    if (mono == "1") out += c.get_str();
    else if (c == 1) out += mono;
    else out += c.get_str() + "*" + mono;
  }
  return out;
}

ExteriorStructure::ExteriorStructure(GradedRing ground, std::vector<int> x_degrees)
    : ground_(std::move(ground)), x_degrees_(std::move(x_degrees)) {
  for (int d : x_degrees_)
    if (d % 2 != 0) throw ValidationError("sequence degrees must be even; got " + std::to_string(d));
}

int ExteriorStructure::degree(const IndexSet& set) const {
  int d = 0;
  for (int j : set) d += generator_degree(j);
  return d;
}

BocksteinComodule::BocksteinComodule(GradedModule module, std::vector<int> x_degrees,
                                     std::vector<std::vector<FreeElement>> images)
    : module_(std::move(module)), x_degrees_(std::move(x_degrees)), images_(std::move(images)) {
  if (images_.size() != x_degrees_.size())
    throw ValidationError("expected one operator per sequence element (" + std::to_string(x_degrees_.size()) +
                          "), got " + std::to_string(images_.size()));
  const auto& gens = module_.generators();
  for (int j = 0; j < size(); ++j) {
    auto& row = images_[u(j)];
    if (row.size() != gens.size())
      throw ValidationError("operator Q" + std::to_string(j) + " must give a value on each of the " +
                            std::to_string(gens.size()) + " generators");
    for (std::size_t g = 0; g < gens.size(); ++g) {
      if (row[g].size() != gens.size()) throw ValidationError("operator value has the wrong number of components");
      bool zero = std::all_of(row[g].begin(), row[g].end(), [](const Polynomial& c) { return c.is_zero(); });
      if (zero) continue;
      auto d = module_.element_degree(row[g]);
      const int want = gens[g].degree - operator_degree(j);
      if (!d || *d != want)
        throw ValidationError("Q" + std::to_string(j) + "(" + gens[g].name + ") = " +
                              module_.element_to_string(row[g]) + " must be homogeneous of degree " +
                              std::to_string(want));
    }
  }
}

BocksteinComodule BocksteinComodule::exterior(const GradedRing& ground, const std::vector<int>& x_degrees,
                                              const IndexSet& active) {
  ExteriorStructure lambda(ground, x_degrees);
  for (std::size_t i = 0; i < active.size(); ++i)
    if (active[i] < 0 || active[i] >= lambda.size() || (i > 0 && active[i - 1] >= active[i]))
      throw ValidationError("active exterior generators must be ascending indices below " +
                            std::to_string(lambda.size()));
  const auto basis = all_index_subsets(active);
  std::map<IndexSet, int> index;
  std::vector<ModuleGenerator> gens;
  for (const auto& s : basis) {
    index.emplace(s, static_cast<int>(gens.size()));
    gens.push_back(ModuleGenerator{index_set_label(s), lambda.degree(s)});
  }
  GradedModule module(ground, gens);
  std::vector<std::vector<FreeElement>> images(u(lambda.size()));
  for (int j = 0; j < lambda.size(); ++j)
    for (const auto& s : basis) {
      FreeElement e = module.zero_element();
      for (const auto& [rest, c] : partial_derivation(j, exterior_monomial(s)))
        e[u(index.at(rest))] = ground.constant(c);
      images[u(j)].push_back(std::move(e));
    }
  return BocksteinComodule(std::move(module), x_degrees, std::move(images));
}

BocksteinComodule BocksteinComodule::trivial(const GradedRing& ground, const std::vector<int>& x_degrees) {
  return exterior(ground, x_degrees, {});
}

ExactMatrix BocksteinComodule::operator_matrix(int j, int degree) const {
  const auto& src = module_.piece(degree);
  const int target = degree - operator_degree(j);
  const auto& tgt = module_.piece(target);
  const Coefficients& ctx = module_.ring().ground();
  ExactMatrix m(ctx, static_cast<int>(tgt.basis.size()), static_cast<int>(src.basis.size()));
  for (std::size_t col = 0; col < src.basis.size(); ++col) {
    const auto& b = src.basis[col];
    const FreeElement& value = image(j, b.generator);
    FreeElement shifted = module_.times(Polynomial::term(ctx, b.monomial), value);
    bool zero = std::all_of(shifted.begin(), shifted.end(), [](const Polynomial& c) { return c.is_zero(); });
    if (zero) continue;
    Vector v = module_.vector_of(shifted, target);
    for (std::size_t row = 0; row < v.size(); ++row)
      if (v[row] != 0) m.add_to(static_cast<int>(row), static_cast<int>(col), v[row]);
  }
  return m;
}

std::string ComoduleCertificate::summary() const {
  if (valid)
    return "operators satisfy the exterior relations in degrees " + std::to_string(degree_min) + ".." +
           std::to_string(degree_max);
  std::string out = std::to_string(violations.size()) + " violation(s)";
  if (!violations.empty()) out += "; first: " + violations.front().description;
  return out;
}

ComoduleCertificate validate_comodule(const BocksteinComodule& m, const Window& window) {
  window.validate();
  ComoduleCertificate cert{false, window.degree_min, window.degree_max, {}};
  const GradedModule& mod = m.module();
  const int n = m.size();
  for (int d = window.degree_min; d <= window.degree_max; ++d) {
    const auto& piece = mod.piece(d);
    if (piece.basis.empty()) continue;
    std::vector<ExactMatrix> q;
    for (int j = 0; j < n; ++j) q.push_back(m.operator_matrix(j, d));
    auto record = [&](ComoduleViolation::Kind kind, int i, int j, const Vector& v, const std::string& what) {
      cert.violations.push_back(ComoduleViolation{kind, i, j, d, v,
                                                  what + " fails in degree " + std::to_string(d) + " on " +
                                                      mod.vector_to_string(v, d)});
    };
    for (int j = 0; j < n; ++j) {
      const std::string qj = "Q" + std::to_string(j);
      const int d1 = d - m.operator_degree(j);
      const auto& t1 = mod.piece(d1);
      for (const auto& z : piece.numerator.generators())
        if (!t1.numerator.contains(q[u(j)].apply(z)))
          record(ComoduleViolation::Kind::kSubmodule, j, j, z, qj + " preserves the submodule");
      for (const auto& r : piece.denominator.generators())
        if (!t1.denominator.contains(q[u(j)].apply(r)))
          record(ComoduleViolation::Kind::kRelation, j, j, r, qj + " preserves the relations");
      if (t1.basis.empty()) continue;
      ExactMatrix qq = m.operator_matrix(j, d1) * q[u(j)];
      const auto& t2 = mod.piece(d1 - m.operator_degree(j));
      for (const auto& z : piece.numerator.generators())
        if (!t2.denominator.contains(qq.apply(z))) record(ComoduleViolation::Kind::kSquare, j, j, z, qj + "^2 = 0");
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const int di = d - m.operator_degree(i);
        const int dj = d - m.operator_degree(j);
        ExactMatrix ij = m.operator_matrix(i, dj) * q[u(j)];
        ExactMatrix ji = m.operator_matrix(j, di) * q[u(i)];
        const auto& t2 = mod.piece(di - m.operator_degree(j));
        ExactMatrix sum = ij + ji;
        for (const auto& z : piece.numerator.generators())
          if (!t2.denominator.contains(sum.apply(z)))
            record(ComoduleViolation::Kind::kAnticommute, i, j, z,
                   "Q" + std::to_string(i) + "Q" + std::to_string(j) + " + Q" + std::to_string(j) + "Q" +
                       std::to_string(i) + " = 0");
      }
  }
  cert.valid = cert.violations.empty();
  return cert;
}

BigradedModule coext(const BocksteinComodule& m, const Window& window) {
  window.validate();
  const GradedModule& mod = m.module();
  BigradedModule out{mod.ring().ground(), {}};
  for (int s = 0; s <= window.max_filtration; ++s)
    for (int t = window.degree_min; t <= window.degree_max; ++t) {
      SymTerm here = sym_term(m, s, t);
      if (here.dim == 0) continue;
      SymTerm next = sym_term(m, s + 1, t - 1);
      ExactMatrix d_out = sym_differential(m, here, next);
      std::optional<SymTerm> prev;
      std::optional<ExactMatrix> d_in;
      if (s > 0) {
        prev = sym_term(m, s - 1, t + 1);
        d_in = sym_differential(m, *prev, here);
      }
      HomologyData h = homology_at(d_in ? &*d_in : nullptr, prev ? &prev->term : nullptr, here.term, &d_out,
                                   &next.term);
      if (h.homology.shape().is_zero()) continue;
      BigradedCell cell{h.homology.shape(), {}};
      for (const auto& g : h.homology.generators()) {
        std::string label;
        for (std::size_t b = 0; b < here.monomials.size(); ++b) {
          const int dim = mod.ambient_dim(here.degrees[b]);
          Vector part(g.begin() + here.offsets[b], g.begin() + here.offsets[b] + dim);
          if (is_zero_vector(part)) continue;
          if (!label.empty()) label += " + ";
          label += tensor_label(y_label(here.monomials[b]), mod.vector_to_string(part, here.degrees[b]));
        }
        cell.labels.push_back(label);
      }
      out.cells.emplace(std::make_pair(s, t), std::move(cell));
    }
  return out;
}

}  // namespace hbss
