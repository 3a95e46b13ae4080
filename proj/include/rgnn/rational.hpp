#pragma once

#include <compare>
#include <concepts>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace rgnn {

/// Raised when text cannot be read as a rational, vector, graph, model or trace.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact rational number in lowest terms with a positive denominator.
///
/// Thin value wrapper over GMP's mpq_class. Every constructor canonicalises,
/// so structural equality is value equality.
class Rational {
 public:
  Rational() = default;

  template <std::integral T>
  Rational(T value) : value_(static_cast<long>(value)) {}  // NOLINT: implicit by intent

  Rational(long numerator, long denominator);

  explicit Rational(mpq_class value);

  /// Reads "p", "-p" or "p/q" with decimal digits only. Zero denominators
  /// and anything else are rejected.
  static Rational parse(std::string_view text);

  /// "p" for integers, "p/q" otherwise.
  std::string str() const;

  int sign() const { return sgn(value_); }
  bool is_zero() const { return sign() == 0; }
  bool is_integer() const;

  const mpq_class& raw() const { return value_; }

  Rational& operator+=(const Rational& rhs);
  Rational& operator-=(const Rational& rhs);
  Rational& operator*=(const Rational& rhs);
  Rational& operator/=(const Rational& rhs);

  friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }
  friend Rational operator-(Rational lhs, const Rational& rhs) { return lhs -= rhs; }
  friend Rational operator*(Rational lhs, const Rational& rhs) { return lhs *= rhs; }
  friend Rational operator/(Rational lhs, const Rational& rhs) { return lhs /= rhs; }
  Rational operator-() const;

  friend bool operator==(const Rational& lhs, const Rational& rhs) {
    return cmp(lhs.value_, rhs.value_) == 0;
  }
  friend std::strong_ordering operator<=>(const Rational& lhs, const Rational& rhs) {
    return cmp(lhs.value_, rhs.value_) <=> 0;
  }

 private:
  mpq_class value_;
};

Rational abs(const Rational& x);

/// max(0, x).
Rational relu(const Rational& x);

std::ostream& operator<<(std::ostream& os, const Rational& x);

}  // namespace rgnn
