#pragma once

// Shared helpers for the test suites: seeded random rationals and vectors.

#include "pverify/geometry.hpp"
#include "pverify/mechanisms.hpp"

#include <random>

namespace pverify::testing {

inline Rational Q(const char* s) { return parse_rational(s); }

inline Vector V(std::initializer_list<const char*> coords) {
  std::vector<Rational> c;
  for (const char* s : coords) c.push_back(parse_rational(s));
  return Vector(std::move(c));
}

class RandomRationals {
public:
  explicit RandomRationals(std::uint64_t seed) : gen_(seed) {}

  /// n/d with |n| <= span * d and d in [1, max_den].
  Rational next(long span = 4, long max_den = 8) {
    std::uniform_int_distribution<long> den(1, max_den);
    const long d = den(gen_);
    std::uniform_int_distribution<long> num(-span * d, span * d);
    return ratio(num(gen_), d);
  }

  Rational nonnegative(long span = 4, long max_den = 8) {
    Rational r = next(span, max_den);
    return r < 0 ? Rational(-r) : r;
  }

  Vector vector(std::size_t m, long span = 4, long max_den = 8) {
    Vector v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = next(span, max_den);
    return v;
  }

  /// Vector with the given coordinate forced to zero.
  Vector vector_with_null(std::size_t m, std::size_t null, long span = 4, long max_den = 8) {
    Vector v = vector(m, span, max_den);
    v[null] = 0;
    return v;
  }

  Vector distinct_vector(std::size_t m, long span = 4, long max_den = 8) {
    while (true) {
      Vector v = vector(m, span, max_den);
      std::vector<Rational> c(v.begin(), v.end());
      std::sort(c.begin(), c.end());
      if (std::adjacent_find(c.begin(), c.end()) == c.end()) return v;
    }
  }

  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_); }

  bool coin() { return std::uniform_int_distribution<int>(0, 1)(gen_) == 1; }

  std::mt19937_64& engine() { return gen_; }

private:
  std::mt19937_64 gen_;
};

}  // namespace pverify::testing
