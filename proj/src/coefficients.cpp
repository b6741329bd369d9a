#include "hbss/coefficients.hpp"

#include <stdexcept>

#include "hbss/errors.hpp"

namespace hbss {

bool is_prime(long p) {
  if (p < 2) return false;
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

int integer_valuation(const mpz_class& x, long p) {
  if (x == 0) return Coefficients::kInfiniteValuation;
  mpz_class rest;
  mpz_class prime(p);
  return static_cast<int>(mpz_remove(rest.get_mpz_t(), x.get_mpz_t(), prime.get_mpz_t()));
}

Coefficients::Coefficients(CoefficientKind kind, long p, int k) : kind_(kind), p_(p), k_(k) {
  if (!is_prime(p)) throw ValidationError("coefficient prime " + std::to_string(p) + " is not prime");
  if (kind != CoefficientKind::kPLocalIntegers) {
    if (k < 1) throw ValidationError("prime power exponent must be at least 1");
    mpz_ui_pow_ui(modulus_.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k));
  }
}

Coefficients Coefficients::prime_field(long p) { return Coefficients(CoefficientKind::kPrimeField, p, 1); }

Coefficients Coefficients::prime_power(long p, int k) {
  if (k == 1) return prime_field(p);
  return Coefficients(CoefficientKind::kPrimePowerRing, p, k);
}

Coefficients Coefficients::p_local(long p) { return Coefficients(CoefficientKind::kPLocalIntegers, p, 0); }

Scalar Coefficients::normalize(const Scalar& x) const {
  const mpz_class& den = x.get_den();
  if (den != 1 && mpz_divisible_ui_p(den.get_mpz_t(), static_cast<unsigned long>(p_)))
    throw std::domain_error("division by a non-unit of " + describe());
  if (is_p_local()) return x;
  mpz_class num = x.get_num();
  if (den != 1) {
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), modulus_.get_mpz_t());
    num *= inv;
  }
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), num.get_mpz_t(), modulus_.get_mpz_t());
  return Scalar(r);
}

int Coefficients::valuation(const Scalar& x) const {
  if (x == 0) return kInfiniteValuation;
  int v = integer_valuation(x.get_num(), p_);
  if (is_finite() && v >= k_) return kInfiniteValuation;
  return v;
}

Scalar Coefficients::prime_power(int e) const {
  if (is_finite() && e >= k_) return Scalar(0);
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p_), static_cast<unsigned long>(e));
  return Scalar(r);
}

Scalar Coefficients::unit_part(const Scalar& x) const {
  int v = valuation(x);
  if (v == kInfiniteValuation) throw std::domain_error("unit part of zero");
  if (is_p_local()) {
    Scalar u = x / prime_power(v);
    u.canonicalize();
    return u;
  }
  mpz_class num = x.get_num();
  mpz_class pv;
  mpz_ui_pow_ui(pv.get_mpz_t(), static_cast<unsigned long>(p_), static_cast<unsigned long>(v));
  mpz_class q = num / pv;
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), q.get_mpz_t(), modulus_.get_mpz_t());
  return Scalar(r);
}

Scalar Coefficients::inverse(const Scalar& unit) const {
  if (!is_unit(unit)) throw std::domain_error("inverse of a non-unit in " + describe());
  if (is_p_local()) {
    Scalar r = 1 / unit;
    r.canonicalize();
    return r;
  }
  mpz_class inv;
  mpz_class num = unit.get_num();
  mpz_invert(inv.get_mpz_t(), num.get_mpz_t(), modulus_.get_mpz_t());
  return Scalar(inv);
}

Scalar Coefficients::divide(const Scalar& a, const Scalar& b) const {
  int va = valuation(a);
  int vb = valuation(b);
  if (vb > va) throw std::domain_error("inexact division in " + describe());
  if (va == kInfiniteValuation) return Scalar(0);
  if (is_p_local()) {
    Scalar q = a / b;
    q.canonicalize();
    return q;
  }
  // a = p^va ua, b = p^vb ub, q = p^(va - vb) ua / ub.
  return normalize(prime_power(va - vb) * unit_part(a) * inverse(unit_part(b)));
}

Scalar Coefficients::reduce_mod_prime_power(const Scalar& x, int e) const {
  mpz_class m;
  mpz_ui_pow_ui(m.get_mpz_t(), static_cast<unsigned long>(p_), static_cast<unsigned long>(e));
  mpz_class num = x.get_num();
  const mpz_class& den = x.get_den();
  if (den != 1) {
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t());
    num *= inv;
  }
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), num.get_mpz_t(), m.get_mpz_t());
  return Scalar(r);
}

std::string Coefficients::to_string(const Scalar& x) const { return x.get_str(); }

std::string Coefficients::describe() const {
  switch (kind_) {
    case CoefficientKind::kPrimeField:
      return "F_" + std::to_string(p_);
    case CoefficientKind::kPrimePowerRing:
      return "Z/" + modulus_.get_str();
    case CoefficientKind::kPLocalIntegers:
      return "Z_(" + std::to_string(p_) + ")";
  }
  return {};
}

}  // namespace hbss
