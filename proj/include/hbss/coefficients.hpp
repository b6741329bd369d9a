#pragma once

#include <climits>
#include <string>

#include <gmpxx.h>

namespace hbss {

/// Exact scalars. Over Z_(p) these are rationals whose denominator is prime
/// to p; over Z/p^k and F_p they are integer residues in [0, p^k).
using Scalar = mpq_class;

enum class CoefficientKind { kPrimeField, kPrimePowerRing, kPLocalIntegers };

/// The local ground ring every degree piece is a module over.
class Coefficients {
 public:
  static constexpr int kInfiniteValuation = INT_MAX / 2;

  static Coefficients prime_field(long p);
  static Coefficients prime_power(long p, int k);
  static Coefficients p_local(long p);

  CoefficientKind kind() const { return kind_; }
  long prime() const { return p_; }
  /// k for Z/p^k, 1 for F_p, 0 for Z_(p).
  int exponent() const { return k_; }
  bool is_field() const { return kind_ == CoefficientKind::kPrimeField; }
  bool is_p_local() const { return kind_ == CoefficientKind::kPLocalIntegers; }
  /// True when the ring is Z/p^k for some k (fields included).
  bool is_finite() const { return kind_ != CoefficientKind::kPLocalIntegers; }

  Scalar normalize(const Scalar& x) const;
  Scalar from_int(long x) const { return normalize(Scalar(x)); }

  /// p-adic valuation; kInfiniteValuation for zero. Over Z/p^k values are < k.
  int valuation(const Scalar& x) const;
  bool is_zero(const Scalar& x) const { return x == 0; }
  bool is_unit(const Scalar& x) const { return valuation(x) == 0; }

  /// Some q with b * q == a. Requires valuation(b) <= valuation(a).
  Scalar divide(const Scalar& a, const Scalar& b) const;
  Scalar inverse(const Scalar& unit) const;
  /// p^e as an element of the ring (zero over Z/p^k when e >= k).
  Scalar prime_power(int e) const;
  /// x = p^v * u with u a unit; returns u.
  Scalar unit_part(const Scalar& x) const;
  /// Canonical representative of x modulo p^e, an integer in [0, p^e).
  Scalar reduce_mod_prime_power(const Scalar& x, int e) const;

  std::string to_string(const Scalar& x) const;
  /// "F_3", "Z/27", "Z_(3)".
  std::string describe() const;

  bool operator==(const Coefficients& o) const { return kind_ == o.kind_ && p_ == o.p_ && k_ == o.k_; }
  bool operator!=(const Coefficients& o) const { return !(*this == o); }

 private:
  Coefficients(CoefficientKind kind, long p, int k);

  CoefficientKind kind_;
  long p_;
  int k_;
  mpz_class modulus_;  // p^k for finite rings
};

bool is_prime(long p);
/// v_p of a nonzero integer.
int integer_valuation(const mpz_class& x, long p);

}  // namespace hbss
