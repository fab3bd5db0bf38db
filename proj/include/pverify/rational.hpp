#pragma once

// Exact rational scalars backed by GMP, plus text conversion in the "p/q"
// encoding used by scenario and result files.

#include <gmpxx.h>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pverify {

using Rational = mpq_class;

/// Base class for every user-facing validation failure (exit code 1 in the CLI).
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when an internal consistency check fails (exit code 2 in the CLI).
class InvariantViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

class ParseError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

/// n/d in lowest terms; the two-argument mpq constructor does not reduce.
inline Rational ratio(long n, long d) {
  if (d == 0) throw ValidationError("zero denominator");
  Rational r(n, d);
  r.canonicalize();
  return r;
}

/// Parses "7", "-3/4" or a finite decimal such as "0.125" into an exact rational.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] { return ParseError("not a rational number: '" + std::string(text) + "'"); };
  if (text.empty()) throw fail();

  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = text[pos] == '-';
    ++pos;
  }
  auto digits = [&](std::size_t from) {
    std::size_t end = from;
    while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
    return end;
  };

  std::size_t int_end = digits(pos);
  if (int_end == pos) throw fail();
  mpz_class num(std::string(text.substr(pos, int_end - pos)), 10);
  mpz_class den = 1;

  if (int_end == text.size()) {
    // integer
  } else if (text[int_end] == '/') {
    std::size_t den_end = digits(int_end + 1);
    if (den_end == int_end + 1 || den_end != text.size()) throw fail();
    den = mpz_class(std::string(text.substr(int_end + 1, den_end - int_end - 1)), 10);
    if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  } else if (text[int_end] == '.') {
    std::size_t frac_end = digits(int_end + 1);
    if (frac_end == int_end + 1 || frac_end != text.size()) throw fail();
    std::string frac(text.substr(int_end + 1, frac_end - int_end - 1));
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    num = num * scale + mpz_class(frac, 10);
    den = scale;
  } else {
    throw fail();
  }

  Rational r(negative ? mpz_class(-num) : num, den);
  r.canonicalize();
  return r;
}

/// Canonical text form: "n" for integers, "n/d" otherwise (lowest terms, d > 0).
inline std::string to_string(const Rational& r) { return r.get_str(); }

inline double to_double(const Rational& r) { return r.get_d(); }

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline int sign(const Rational& r) { return sgn(r); }

}  // namespace pverify
