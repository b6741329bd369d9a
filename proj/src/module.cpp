#include "hbss/module.hpp"

#include <mutex>

#include "hbss/errors.hpp"

namespace hbss {
namespace {

inline std::size_t u(int i) { return static_cast<std::size_t>(i); }

Polynomial rebind(const Polynomial& x, const GradedRing& target) {
  Polynomial out = target.zero();
  for (const auto& [m, c] : x.terms()) {
    for (int i = 0; i < target.size(); ++i)
      if (m[u(i)] < 0 && i != target.invertible_index())
        throw ValidationError("negative power of " + target.generators()[u(i)].name + " in " + target.describe());
    out.add_term(m, c);
  }
  return out;
}

bool needs_parentheses(const std::string& label) {
  return label.find_first_of("+-") != std::string::npos;
}

}  // namespace

void Window::validate() const {
  if (degree_min > degree_max)
    throw ValidationError("window degree range is empty: " + std::to_string(degree_min) + ".." +
                          std::to_string(degree_max));
  if (max_filtration < 1) throw ValidationError("max_filtration must be at least 1");
  if (max_page < 1) throw ValidationError("max_page must be at least 1");
}

struct GradedModule::Cache {
  std::mutex mutex;
  std::map<int, std::unique_ptr<Piece>> pieces;
};

GradedModule::GradedModule(GradedRing ring, std::vector<ModuleGenerator> generators, std::vector<FreeElement> relations,
                           std::optional<std::vector<FreeElement>> numerator, std::optional<int> cap)
    : ring_(std::move(ring)),
      gens_(std::move(generators)),
      relations_(std::move(relations)),
      numerator_(std::move(numerator)),
      cap_(cap),
      cache_(std::make_shared<Cache>()) {
  auto check = [&](const std::vector<FreeElement>& elements, const char* what) {
    for (const auto& e : elements) {
      if (e.size() != gens_.size()) throw ValidationError(std::string(what) + " has the wrong number of components");
      bool zero = true;
      for (const auto& c : e) zero = zero && c.is_zero();
      if (!zero && !element_degree(e))
        throw ValidationError(std::string(what) + " " + element_to_string(e) + " is not homogeneous");
    }
  };
  check(relations_, "relation");
  if (numerator_) check(*numerator_, "submodule generator");
  if (cap_ && *cap_ < 0) throw ValidationError("truncation cap must be non-negative");
}

GradedModule GradedModule::cyclic(const GradedRing& ring, const std::vector<Polynomial>& relations,
                                  std::optional<int> cap) {
  std::vector<FreeElement> rels;
  for (const auto& r : relations) rels.push_back(FreeElement{r});
  return GradedModule(ring, {ModuleGenerator{"1", 0}}, rels, std::nullopt, cap);
}

FreeElement GradedModule::zero_element() const { return FreeElement(gens_.size(), ring_.zero()); }

FreeElement GradedModule::basis_element(int generator) const {
  FreeElement e = zero_element();
  e[u(generator)] = ring_.one();
  return e;
}

FreeElement GradedModule::times(const Polynomial& x, const FreeElement& e) const {
  FreeElement out;
  out.reserve(e.size());
  for (const auto& c : e) out.push_back(x * c);
  return out;
}

std::optional<int> GradedModule::element_degree(const FreeElement& e) const {
  std::optional<int> d;
  for (std::size_t g = 0; g < e.size(); ++g)
    for (const auto& [m, c] : e[g].terms()) {
      int dm = ring_.degree(m) + gens_[g].degree;
      if (d && *d != dm) return std::nullopt;
      d = dm;
    }
  return d;
}

std::string GradedModule::element_to_string(const FreeElement& e) const {
  std::string out;
  for (std::size_t g = 0; g < e.size(); ++g) {
    if (e[g].is_zero()) continue;
    std::string coeff = e[g].to_string(ring_);
    std::string name = gens_[g].name;
    std::string part;
    if (name == "1")
      part = coeff;
    else if (coeff == "1")
      part = name;
    else if (e[g].terms().size() > 1)
      part = "(" + coeff + ")*" + name;
    else
      part = coeff + "*" + name;
    if (!out.empty()) out += " + ";
    out += part;
  }
  return out.empty() ? "0" : out;
}

std::vector<Vector> GradedModule::spanning_vectors(const std::vector<FreeElement>& elements, const Piece& p) const {
  std::vector<Vector> out;
  const int dim = static_cast<int>(p.basis.size());
  for (const auto& e : elements) {
    auto de = element_degree(e);
    if (!de) continue;
    for (const auto& mu : ring_.monomials(p.degree - *de, cap_)) {
      Vector v = zero_vector(dim);
      bool nonzero = false;
      for (std::size_t g = 0; g < e.size(); ++g)
        for (const auto& [m, c] : e[g].terms()) {
          Monomial prod(m.size());
          for (std::size_t i = 0; i < m.size(); ++i) prod[i] = m[i] + mu[i];
          auto it = p.index.find({static_cast<int>(g), prod});
          if (it == p.index.end()) continue;  // above the cap
          v[u(it->second)] += c;
          nonzero = true;
        }
      if (nonzero) out.push_back(std::move(v));
    }
  }
  return out;
}

const GradedModule::Piece& GradedModule::piece(int degree) const {
  std::lock_guard<std::mutex> lock(cache_->mutex);
  auto it = cache_->pieces.find(degree);
  if (it != cache_->pieces.end()) return *it->second;

  const Coefficients& ctx = ring_.ground();
  std::vector<BasisElement> basis;
  std::map<std::pair<int, Monomial>, int> index;
  for (int g = 0; g < static_cast<int>(gens_.size()); ++g)
    for (auto& m : ring_.monomials(degree - gens_[u(g)].degree, cap_)) {
      index.emplace(std::make_pair(g, m), static_cast<int>(basis.size()));
      basis.push_back(BasisElement{g, std::move(m)});
    }
  const int dim = static_cast<int>(basis.size());
  // Temporary piece to resolve indices while building spans.
  Piece scratch{degree, basis, index, Span(ctx, dim), Span(ctx, dim), Subquotient(Span(ctx, dim), Span(ctx, dim))};
  Span num = numerator_ ? Span::from_vectors(ctx, dim, spanning_vectors(*numerator_, scratch)) : Span::whole(ctx, dim);
  Span den = Span::from_vectors(ctx, dim, spanning_vectors(relations_, scratch));
  Subquotient q = Subquotient::of(num, den);
  auto piece = std::make_unique<Piece>(
      Piece{degree, std::move(basis), std::move(index), std::move(num), std::move(den), std::move(q)});
  const Piece& ref = *piece;
  cache_->pieces.emplace(degree, std::move(piece));
  return ref;
}

Vector GradedModule::vector_of(const FreeElement& e, int degree) const {
  const Piece& p = piece(degree);
  Vector v = zero_vector(static_cast<int>(p.basis.size()));
  for (std::size_t g = 0; g < e.size(); ++g)
    for (const auto& [m, c] : e[g].terms()) {
      if (ring_.degree(m) + gens_[g].degree != degree)
        throw std::invalid_argument("vector_of: element is not of degree " + std::to_string(degree));
      auto it = p.index.find({static_cast<int>(g), m});
      if (it == p.index.end()) continue;  // above the cap
      v[u(it->second)] += c;
    }
  for (auto& x : v) x = ring_.ground().normalize(x);
  return v;
}

FreeElement GradedModule::element_of(const Vector& v, int degree) const {
  const Piece& p = piece(degree);
  FreeElement e = zero_element();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0) e[u(p.basis[i].generator)].add_term(p.basis[i].monomial, v[i]);
  return e;
}

std::string GradedModule::vector_to_string(const Vector& v, int degree) const {
  return element_to_string(element_of(v, degree));
}

ExactMatrix GradedModule::multiplication(const Polynomial& x, int degree) const {
  auto dx = x.homogeneous_degree(ring_);
  const Piece& src = piece(degree);
  if (!dx) return ExactMatrix(ring_.ground(), static_cast<int>(src.basis.size()), static_cast<int>(src.basis.size()));
  const Piece& tgt = piece(degree + *dx);
  ExactMatrix m(ring_.ground(), static_cast<int>(tgt.basis.size()), static_cast<int>(src.basis.size()));
  for (std::size_t j = 0; j < src.basis.size(); ++j)
    for (const auto& [mu, c] : x.terms()) {
      Monomial prod = src.basis[j].monomial;
      for (std::size_t i = 0; i < prod.size(); ++i) prod[i] += mu[i];
      auto it = tgt.index.find({src.basis[j].generator, prod});
      if (it == tgt.index.end()) continue;  // above the cap
      m.add_to(it->second, static_cast<int>(j), c);
    }
  return m;
}

std::vector<FreeElement> GradedModule::numerator_generators() const {
  if (numerator_) return *numerator_;
  std::vector<FreeElement> out;
  for (int g = 0; g < static_cast<int>(gens_.size()); ++g) out.push_back(basis_element(g));
  return out;
}

GradedModule GradedModule::with_relations(const std::vector<FreeElement>& extra) const {
  std::vector<FreeElement> rels = relations_;
  rels.insert(rels.end(), extra.begin(), extra.end());
  return GradedModule(ring_, gens_, std::move(rels), numerator_, cap_);
}

GradedModule GradedModule::quotient_by(const std::vector<Polynomial>& xs) const {
  std::vector<FreeElement> extra;
  for (const auto& n : numerator_generators())
    for (const auto& x : xs) extra.push_back(times(x, n));
  return with_relations(extra);
}

GradedModule GradedModule::with_cap(std::optional<int> cap) const {
  return GradedModule(ring_, gens_, relations_, numerator_, cap);
}

GradedModule GradedModule::over_ring(const GradedRing& ring) const {
  if (ring.size() != ring_.size()) throw ValidationError("over_ring: generator count mismatch");
  auto convert = [&](const std::vector<FreeElement>& elements) {
    std::vector<FreeElement> out;
    for (const auto& e : elements) {
      FreeElement f;
      for (const auto& c : e) f.push_back(rebind(c, ring));
      out.push_back(std::move(f));
    }
    return out;
  };
  std::optional<std::vector<FreeElement>> num;
  if (numerator_) num = convert(*numerator_);
  return GradedModule(ring, gens_, convert(relations_), num, cap_);
}

RegularSequence::RegularSequence(GradedRing ring, std::vector<Polynomial> elements, std::vector<std::string> labels)
    : ring_(std::move(ring)), elements_(std::move(elements)), labels_(std::move(labels)) {
  if (!labels_.empty() && labels_.size() != elements_.size())
    throw std::invalid_argument("sequence label count mismatch");
  for (std::size_t j = 0; j < elements_.size(); ++j) {
    const Polynomial& x = elements_[j];
    if (labels_.size() < elements_.size()) {
      bool is_prime = x.terms().size() == 1 && ring_.degree(x.terms().begin()->first) == 0 &&
                      x.terms().begin()->first == Monomial(u(ring_.size()), 0) &&
                      x.terms().begin()->second == ring_.ground().normalize(Scalar(ring_.ground().prime()));
      labels_.push_back(is_prime ? "p" : x.to_string(ring_));
    }
    if (x.is_zero()) throw ValidationError("sequence element " + labels_[j] + " is zero");
    auto d = x.homogeneous_degree(ring_);
    if (!d) throw ValidationError("sequence element " + labels_[j] + " is not homogeneous");
    if (*d % 2 != 0) throw ValidationError("sequence element " + labels_[j] + " has odd degree");
    degrees_.push_back(*d);
  }
}

RegularSequence RegularSequence::parse(const GradedRing& ring, const std::vector<std::string>& texts) {
  std::vector<Polynomial> elements;
  for (const auto& t : texts) elements.push_back(ring.parse(t));
  return RegularSequence(ring, std::move(elements));
}

std::optional<int> RegularSequence::verbatim(int j) const {
  const auto& terms = element(j).terms();
  if (terms.size() != 1) return std::nullopt;
  const auto& [m, c] = *terms.begin();
  int nonzero = 0, idx = -1;
  for (int i = 0; i < static_cast<int>(m.size()); ++i)
    if (m[u(i)] != 0) {
      ++nonzero;
      idx = i;
    }
  if (nonzero == 0) return c == ring_.ground().normalize(Scalar(ring_.ground().prime())) ? std::optional<int>(-1)
                                                                                        : std::nullopt;
  if (nonzero == 1 && m[u(idx)] == 1 && c == 1) return idx;
  return std::nullopt;
}

bool RegularSequence::contains_prime() const {
  for (int j = 0; j < size(); ++j)
    if (verbatim(j) == -1) return true;
  return false;
}

bool RegularSequence::supports_cap() const {
  for (int i = 0; i < ring_.size(); ++i) {
    if (i == ring_.invertible_index()) continue;
    bool found = false;
    for (int j = 0; j < size() && !found; ++j) found = verbatim(j) == i;
    if (!found) return false;
  }
  return true;
}

int RegularSequence::monomial_degree(const Monomial& e) const {
  int d = 0;
  for (int j = 0; j < size(); ++j) d += e[u(j)] * degrees_[u(j)];
  return d;
}

Polynomial RegularSequence::monomial_value(const Monomial& e) const {
  Polynomial out = ring_.one();
  for (int j = 0; j < size(); ++j) out = out * element(j).power(e[u(j)]);
  return out;
}

std::string RegularSequence::monomial_label(const Monomial& e) const {
  std::string out;
  for (int j = 0; j < size(); ++j) {
    if (e[u(j)] == 0) continue;
    if (!out.empty()) out += "*";
    std::string l = label(j);
    out += needs_parentheses(l) ? "(" + l + ")" : l;
    if (e[u(j)] != 1) out += "^" + std::to_string(e[u(j)]);
  }
  return out.empty() ? "1" : out;
}

std::optional<int> truncation_cap(const RegularSequence& sequence, int max_filtration) {
  if (!sequence.ring().has_infinite_pieces()) return std::nullopt;
  if (!sequence.supports_cap())
    throw ValidationError("degree pieces of " + sequence.ring().describe() +
                          " are infinite; every non-inverted generator must occur verbatim in the sequence");
  return max_filtration + 1;
}

std::vector<Polynomial> ideal_power(const RegularSequence& sequence, int s) {
  if (s < 0) throw std::invalid_argument("ideal power exponent must be non-negative");
  std::vector<Polynomial> out;
  for (const auto& e : symmetric_monomials(sequence.size(), s)) out.push_back(sequence.monomial_value(e));
  return out;
}

GradedModule ideal_power_module(const RegularSequence& sequence, int s, std::optional<int> cap) {
  std::vector<FreeElement> num;
  for (auto& x : ideal_power(sequence, s)) num.push_back(FreeElement{std::move(x)});
  return GradedModule(sequence.ring(), {ModuleGenerator{"1", 0}}, {}, std::move(num), cap);
}

GradedModule graded_piece_module(const RegularSequence& sequence, int s, std::optional<int> cap) {
  std::vector<FreeElement> num, rel;
  for (auto& x : ideal_power(sequence, s)) num.push_back(FreeElement{std::move(x)});
  for (auto& x : ideal_power(sequence, s + 1)) rel.push_back(FreeElement{std::move(x)});
  return GradedModule(sequence.ring(), {ModuleGenerator{"1", 0}}, std::move(rel), std::move(num), cap);
}

GradedModule quotient_module(const GradedModule& module, const RegularSequence& sequence, int s) {
  if (s < 1) throw std::invalid_argument("quotient_module needs s >= 1");
  return module.quotient_by(ideal_power(sequence, s));
}

std::string RegularityReport::summary() const {
  if (regular) {
    std::string out = "regular";
    if (via_polynomial_cover) out += " (checked on the polynomial cover)";
    return out;
  }
  if (violation) {
    return "not regular: x_" + std::to_string(violation->index) + " is a zero divisor in degree " +
           std::to_string(violation->degree) + ", witness " + violation->description;
  }
  return "not regular: M/SM vanishes throughout the window";
}

RegularityReport regularity_check(const GradedModule& module, const RegularSequence& sequence, const Window& window) {
  window.validate();
  RegularityReport report;
  const GradedRing& ring = sequence.ring();
  if (!(module.ring() == ring)) throw ValidationError("module and sequence live over different rings");

  GradedModule m = module;
  std::vector<Polynomial> xs = sequence.elements();
  if (ring.invertible_index() >= 0 && ring.has_infinite_pieces()) {
    GradedRing cover = ring.polynomial_cover();
    m = module.over_ring(cover).with_cap(std::nullopt);
    for (auto& x : xs) x = rebind(x, cover);
    report.via_polynomial_cover = true;
  }

  std::vector<Polynomial> prefix;
  for (int i = 0; i < sequence.size(); ++i) {
    GradedModule quotient = m.quotient_by(prefix);
    const int dx = sequence.degree(i);
    const int lo = window.degree_min;
    const int hi = window.degree_max - dx;
    if (hi < lo)
      throw WindowTooSmall("window " + std::to_string(window.degree_min) + ".." + std::to_string(window.degree_max) +
                           " cannot hold multiplication by " + sequence.label(i) + " (degree " +
                           std::to_string(dx) + ")");
    report.checked.emplace_back(lo, hi);
    for (int d = lo; d <= hi; ++d) {
      const auto& src = quotient.piece(d);
      const auto& tgt = quotient.piece(d + dx);
      ExactMatrix mult = quotient.multiplication(xs[u(i)], d);
      Term here = src.term();
      Term target = tgt.term();
      HomologyData h = homology_at(nullptr, nullptr, here, &mult, &target);
      if (h.homology.size() > 0) {
        const Vector& w = h.homology.generators().front();
        report.violation = RegularityViolation{i, d, w, quotient.vector_to_string(w, d)};
        return report;
      }
    }
    prefix.push_back(xs[u(i)]);
  }

  GradedModule total = module.quotient_by(sequence.elements());
  for (int d = window.degree_min; d <= window.degree_max; ++d)
    if (!total.shape(d).is_zero()) {
      report.nonzero_quotient_degree = d;
      break;
    }
  report.regular = report.nonzero_quotient_degree.has_value();
  return report;
}

ResidueRing residue_ring(const RegularSequence& sequence) {
  const GradedRing& ring = sequence.ring();
  std::vector<bool> killed(u(ring.size()), false);
  bool prime = false;
  for (int j = 0; j < sequence.size(); ++j) {
    auto v = sequence.verbatim(j);
    if (!v)
      throw ValidationError("residue ring needs every sequence element to be p or a ring generator; got " +
                            sequence.label(j));
    if (*v == -1)
      prime = true;
    else
      killed[u(*v)] = true;
  }
  ResidueRing out{GradedRing(prime ? Coefficients::prime_field(ring.ground().prime()) : ring.ground(), {}), {}};
  std::vector<RingGenerator> gens;
  for (int i = 0; i < ring.size(); ++i)
    if (!killed[u(i)]) {
      gens.push_back(ring.generators()[u(i)]);
      out.kept.push_back(i);
    }
  out.ring = GradedRing(out.ring.ground(), gens);
  return out;
}

ModuleShape BigradedModule::shape(int s, int t) const {
  auto it = cells.find({s, t});
  return it == cells.end() ? ModuleShape{} : it->second.shape;
}

BigradedModule associated_graded(const RegularSequence& sequence, const Window& window) {
  window.validate();
  ResidueRing l = residue_ring(sequence);
  BigradedModule out{l.ring.ground(), {}};
  for (int s = 0; s <= window.max_filtration; ++s)
    for (const auto& mu : symmetric_monomials(sequence.size(), s)) {
      const int dmu = sequence.monomial_degree(mu);
      const std::string bar = "{" + sequence.monomial_label(mu) + "}";
      for (int t = window.degree_min; t <= window.degree_max; ++t)
        for (const auto& lm : l.ring.monomials(t - dmu)) {
          std::string prefix = l.ring.monomial_to_string(lm);
          BigradedCell& cell = out.cells[{s, t}];
          cell.shape.free_rank += 1;
          cell.labels.push_back(prefix == "1" ? bar : prefix + "*" + bar);
        }
    }
  return out;
}

}  // namespace hbss
