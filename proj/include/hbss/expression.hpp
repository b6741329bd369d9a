#pragma once

#include <map>
#include <string>

#include <gmpxx.h>

namespace hbss {

/// Product of named symbols with integer exponents; absent means exponent 0.
using SymbolPower = std::map<std::string, int>;

/// Integer-coefficient polynomial in named symbols, before any symbol is bound
/// to a ring generator or module basis element.
using SymbolicPolynomial = std::map<SymbolPower, mpz_class>;

/// Parses `3*v1^2 - p*(a0 + v2^-1*a1)`. Negative exponents are allowed on
/// symbols only. Throws SyntaxError with a 1-based column.
SymbolicPolynomial parse_symbolic(const std::string& text);

std::string symbolic_to_string(const SymbolicPolynomial& poly);

}  // namespace hbss
