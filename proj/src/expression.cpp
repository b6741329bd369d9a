#include "hbss/expression.hpp"

#include <cctype>

#include "hbss/errors.hpp"

namespace hbss {
namespace {

SymbolicPolynomial multiply(const SymbolicPolynomial& a, const SymbolicPolynomial& b) {
  SymbolicPolynomial out;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) {
      SymbolPower m = ma;
      for (const auto& [name, e] : mb) {
        int& slot = m[name];
        slot += e;
        if (slot == 0) m.erase(name);
      }
      mpz_class& c = out[m];
      c += ca * cb;
      if (c == 0) out.erase(m);
    }
  return out;
}

void accumulate(SymbolicPolynomial& into, const SymbolicPolynomial& other, int sign) {
  for (const auto& [m, c] : other) {
    mpz_class& slot = into[m];
    slot += sign * c;
    if (slot == 0) into.erase(m);
  }
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  SymbolicPolynomial parse() {
    skip_space();
    if (pos_ >= text_.size()) fail("empty expression");
    SymbolicPolynomial out = expression();
    skip_space();
    if (pos_ < text_.size()) fail(std::string("unexpected character '") + text_[pos_] + "'");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw SyntaxError(message, 0, static_cast<int>(pos_) + 1);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  SymbolicPolynomial expression() {
    SymbolicPolynomial out;
    int sign = 1;
    if (accept('-'))
      sign = -1;
    else
      accept('+');
    accumulate(out, term(), sign);
    while (true) {
      if (accept('+'))
        accumulate(out, term(), 1);
      else if (accept('-'))
        accumulate(out, term(), -1);
      else
        break;
    }
    return out;
  }

  SymbolicPolynomial term() {
    SymbolicPolynomial out = factor();
    while (accept('*')) out = multiply(out, factor());
    return out;
  }

  long exponent() {
    skip_space();
    bool negative = false;
    if (pos_ < text_.size() && text_[pos_] == '-') {
      negative = true;
      ++pos_;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer exponent");
    if (pos_ - start > 6) fail("exponent too large");
    long e = std::stol(text_.substr(start, pos_ - start));
    return negative ? -e : e;
  }

  SymbolicPolynomial factor() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    std::size_t here = pos_;
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      SymbolicPolynomial inner = expression();
      if (!accept(')')) fail("expected ')'");
      if (accept('^')) {
        long e = exponent();
        if (e < 0) {
          pos_ = here;
          fail("negative exponent on a parenthesized expression");
        }
        SymbolicPolynomial out{{SymbolPower{}, mpz_class(1)}};
        for (long i = 0; i < e; ++i) out = multiply(out, inner);
        return out;
      }
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      mpz_class value(text_.substr(start, pos_ - start));
      if (accept('^')) {
        long e = exponent();
        if (e < 0) fail("negative exponent on an integer");
        mpz_class base = value;
        mpz_pow_ui(value.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(e));
      }
      SymbolicPolynomial out;
      if (value != 0) out[SymbolPower{}] = value;
      return out;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string name = text_.substr(start, pos_ - start);
      long e = 1;
      if (accept('^')) e = exponent();
      SymbolicPolynomial out;
      if (e == 0)
        out[SymbolPower{}] = 1;
      else
        out[SymbolPower{{name, static_cast<int>(e)}}] = 1;
      return out;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

SymbolicPolynomial parse_symbolic(const std::string& text) { return Parser(text).parse(); }

std::string symbolic_to_string(const SymbolicPolynomial& poly) {
  if (poly.empty()) return "0";
  std::string out;
  for (const auto& [m, c] : poly) {
    mpz_class mag = abs(c);
    if (out.empty())
      out += c < 0 ? "-" : "";
    else
      out += c < 0 ? " - " : " + ";
    std::string mono;
    for (const auto& [name, e] : m) {
      if (!mono.empty()) mono += "*";
      mono += name;
      if (e != 1) mono += "^" + std::to_string(e);
    }
    if (mono.empty())
      out += mag.get_str();
    else if (mag == 1)
      out += mono;
    else
      out += mag.get_str() + "*" + mono;
  }
  return out;
}

}  // namespace hbss
