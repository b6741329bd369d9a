#include "hbss/ring.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

#include "hbss/errors.hpp"

namespace hbss {
namespace {

inline std::size_t u(int i) { return static_cast<std::size_t>(i); }

bool valid_name(const std::string& name) {
  if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) return false;
  return std::all_of(name.begin(), name.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

}  // namespace

bool grlex_less(const Monomial& a, const Monomial& b) {
  int ta = 0, tb = 0;
  for (int x : a) ta += x;
  for (int x : b) tb += x;
  if (ta != tb) return ta < tb;
  for (std::size_t i = a.size(); i-- > 0;)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

std::vector<Monomial> symmetric_monomials(int n, int s) {
  std::vector<Monomial> out;
  if (n == 0) {
    if (s == 0) out.emplace_back();
    return out;
  }
  Monomial m(u(n), 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == n - 1) {
      m[u(i)] = left;
      out.push_back(m);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      m[u(i)] = e;
      rec(i + 1, left - e);
    }
  };
  rec(0, s);
  std::sort(out.begin(), out.end(), grlex_less);
  return out;
}

Polynomial::Polynomial(Coefficients ctx, int variables) : ctx_(std::move(ctx)), vars_(variables) {}

Polynomial Polynomial::term(const Coefficients& ctx, const Monomial& m, const Scalar& c) {
  Polynomial p(ctx, static_cast<int>(m.size()));
  p.add_term(m, c);
  return p;
}

void Polynomial::add_term(const Monomial& m, const Scalar& c) {
  if (static_cast<int>(m.size()) != vars_) throw std::invalid_argument("monomial arity mismatch");
  auto it = terms_.find(m);
  Scalar v = ctx_.normalize(it == terms_.end() ? c : it->second + c);
  if (v == 0) {
    if (it != terms_.end()) terms_.erase(it);
  } else if (it == terms_.end()) {
    terms_.emplace(m, std::move(v));
  } else {
    it->second = std::move(v);
  }
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial out = *this;
  for (const auto& [m, c] : o.terms_) out.add_term(m, c);
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o.scaled(Scalar(-1)); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (vars_ != o.vars_) throw std::invalid_argument("polynomial arity mismatch");
  Polynomial out(ctx_, vars_);
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) {
      Monomial m(ma.size());
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
      out.add_term(m, ca * cb);
    }
  return out;
}

Polynomial Polynomial::scaled(const Scalar& c) const {
  Polynomial out(ctx_, vars_);
  for (const auto& [m, v] : terms_) out.add_term(m, v * c);
  return out;
}

Polynomial Polynomial::power(int e) const {
  if (e < 0) throw std::invalid_argument("negative polynomial power");
  Polynomial out = term(ctx_, Monomial(u(vars_), 0));
  for (int i = 0; i < e; ++i) out = out * *this;
  return out;
}

std::optional<int> Polynomial::homogeneous_degree(const GradedRing& ring) const {
  std::optional<int> d;
  for (const auto& [m, c] : terms_) {
    int dm = ring.degree(m);
    if (d && *d != dm) return std::nullopt;
    d = dm;
  }
  return d;
}

std::string Polynomial::to_string(const GradedRing& ring) const {
  if (terms_.empty()) return "0";
  std::vector<Monomial> order;
  for (const auto& [m, c] : terms_) order.push_back(m);
  std::sort(order.begin(), order.end(), grlex_less);
  std::string out;
  for (const auto& m : order) {
    Scalar c = terms_.at(m);
    bool negative = c < 0;
    if (negative) c = -c;
    if (!out.empty()) out += negative ? " - " : " + ";
    else if (negative) out += "-";
    std::string mono = ring.monomial_to_string(m);
    if (mono == "1")
      out += c.get_str();
    else if (c == 1)
      out += mono;
    else
      out += c.get_str() + "*" + mono;
  }
  return out;
}

GradedRing::GradedRing(Coefficients ground, std::vector<RingGenerator> generators)
    : ground_(std::move(ground)), gens_(std::move(generators)) {
  std::set<std::string> names;
  for (int i = 0; i < size(); ++i) {
    const RingGenerator& g = gens_[u(i)];
    if (!valid_name(g.name)) throw ValidationError("invalid generator name '" + g.name + "'");
    if (g.name == "p") throw ValidationError("generator name 'p' is reserved for the prime");
    if (!names.insert(g.name).second) throw ValidationError("duplicate generator '" + g.name + "'");
    if (g.degree % 2 != 0)
      throw ValidationError("generator " + g.name + " has odd degree " + std::to_string(g.degree) +
                            "; all generator degrees must be even");
    if (g.invertible) {
      if (inv_ >= 0) throw ValidationError("at most one generator may be invertible");
      if (g.degree <= 0) throw ValidationError("invertible generator " + g.name + " must have positive degree");
      inv_ = i;
    } else if (g.degree <= 0) {
      throw ValidationError("generator " + g.name + " must have positive degree unless invertible");
    }
  }
}

std::optional<int> GradedRing::index_of(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (gens_[u(i)].name == name) return i;
  return std::nullopt;
}

bool GradedRing::has_infinite_pieces() const { return inv_ >= 0 && size() > 1; }

int GradedRing::degree(const Monomial& m) const {
  int d = 0;
  for (int i = 0; i < size(); ++i) d += m[u(i)] * gens_[u(i)].degree;
  return d;
}

int GradedRing::weight(const Monomial& m) const {
  int w = 0;
  for (int i = 0; i < size(); ++i)
    if (i != inv_) w += m[u(i)];
  return w;
}

std::vector<Monomial> GradedRing::monomials(int degree, std::optional<int> cap) const {
  std::vector<Monomial> out;
  if (has_infinite_pieces() && !cap)
    throw WindowTooSmall("degree " + std::to_string(degree) + " of " + describe() +
                         " has infinite rank; a filtration cap is required");
  std::vector<int> plain;
  for (int i = 0; i < size(); ++i)
    if (i != inv_) plain.push_back(i);
  Monomial m(u(size()), 0);
  std::function<void(std::size_t, int, int)> rec = [&](std::size_t k, int partial, int weight) {
    if (k == plain.size()) {
      if (inv_ < 0) {
        if (partial == degree) out.push_back(m);
        return;
      }
      int rest = degree - partial;
      int d = gens_[u(inv_)].degree;
      if (rest % d != 0) return;
      m[u(inv_)] = rest / d;
      out.push_back(m);
      m[u(inv_)] = 0;
      return;
    }
    int g = plain[k];
    int dg = gens_[u(g)].degree;
    for (int e = 0;; ++e) {
      if (cap && weight + e > *cap) break;
      if (inv_ < 0 && partial + e * dg > degree) break;
      m[u(g)] = e;
      rec(k + 1, partial + e * dg, weight + e);
    }
    m[u(g)] = 0;
  };
  rec(0, 0, 0);
  std::sort(out.begin(), out.end(), grlex_less);
  return out;
}

Polynomial GradedRing::one() const { return constant(Scalar(1)); }

Polynomial GradedRing::constant(const Scalar& c) const {
  return Polynomial::term(ground_, Monomial(u(size()), 0), c);
}

Polynomial GradedRing::generator(int i) const {
  Monomial m(u(size()), 0);
  m[u(i)] = 1;
  return Polynomial::term(ground_, m);
}

Polynomial GradedRing::from_symbolic(const SymbolicPolynomial& poly) const {
  Polynomial out = zero();
  for (const auto& [powers, coeff] : poly) {
    Monomial m(u(size()), 0);
    Scalar c(coeff);
    for (const auto& [name, e] : powers) {
      if (name == "p") {
        if (e < 0) throw ValidationError("p is not invertible in " + describe());
        c *= ground_.prime_power(e);
        continue;
      }
      auto idx = index_of(name);
      if (!idx) throw ValidationError("unknown ring generator '" + name + "'");
      if (e < 0 && *idx != inv_) throw ValidationError("generator " + name + " is not invertible");
      m[u(*idx)] += e;
    }
    out.add_term(m, c);
  }
  return out;
}

Polynomial GradedRing::parse(const std::string& text) const { return from_symbolic(parse_symbolic(text)); }

std::string GradedRing::monomial_to_string(const Monomial& m) const {
  std::string out;
  for (int i = 0; i < size(); ++i) {
    int e = m[u(i)];
    if (e == 0) continue;
    if (!out.empty()) out += "*";
    out += gens_[u(i)].name;
    if (e != 1) out += "^" + std::to_string(e);
  }
  return out.empty() ? "1" : out;
}

std::string GradedRing::describe() const {
  std::string out = ground_.describe();
  if (gens_.empty()) return out;
  out += "[";
  for (int i = 0; i < size(); ++i) {
    if (i) out += ", ";
    out += gens_[u(i)].name;
    if (gens_[u(i)].invertible) out += "^+-1";
  }
  return out + "]";
}

GradedRing GradedRing::polynomial_cover() const {
  std::vector<RingGenerator> gens = gens_;
  for (auto& g : gens) g.invertible = false;
  return GradedRing(ground_, gens);
}

GradedRing GradedRing::with_ground(const Coefficients& ground) const { return GradedRing(ground, gens_); }

bool GradedRing::operator==(const GradedRing& o) const {
  if (ground_ != o.ground_ || gens_.size() != o.gens_.size()) return false;
  for (std::size_t i = 0; i < gens_.size(); ++i)
    if (gens_[i].name != o.gens_[i].name || gens_[i].degree != o.gens_[i].degree ||
        gens_[i].invertible != o.gens_[i].invertible)
      return false;
  return true;
}

}  // namespace hbss
