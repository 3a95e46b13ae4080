#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "rgnn/network.hpp"

namespace rgnn {

/// Reference to a network input or to a ReLU unit created by a NetworkBuilder.
struct Term {
  enum class Kind { input, relu };
  Kind kind;
  std::size_t index;

  friend auto operator<=>(const Term&, const Term&) = default;
};

/// Affine combination of terms plus a constant.
struct LinearExpr {
  std::map<Term, Rational> coeffs;
  Rational constant;

  LinearExpr() = default;
  LinearExpr(Rational c) : constant(std::move(c)) {}  // NOLINT: implicit constant
  LinearExpr(Term t, Rational c = 1);

  LinearExpr& operator+=(const LinearExpr& rhs);
  LinearExpr& operator-=(const LinearExpr& rhs);
  LinearExpr& operator*=(const Rational& k);

  friend LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a += b; }
  friend LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return a -= b; }
  friend LinearExpr operator*(LinearExpr a, const Rational& k) { return a *= k; }
  friend LinearExpr operator*(const Rational& k, LinearExpr a) { return a *= k; }
  LinearExpr operator-() const { return *this * Rational(-1); }
};

/// Assembles ReLU circuits symbolically and lays them out as one
/// SimpleFunction.
///
/// Each ReLU unit gets a depth (one more than the deepest unit it reads).
/// `compile` emits one hidden layer per depth; inputs that are still needed
/// deeper are carried as the pair (ReLU(x), ReLU(-x)) and earlier units, being
/// non-negative, are carried as themselves.
class NetworkBuilder {
 public:
  explicit NetworkBuilder(std::size_t input_dim) : input_dim_(input_dim) {}

  std::size_t input_dim() const { return input_dim_; }

  LinearExpr input(std::size_t i) const;
  std::vector<LinearExpr> inputs(std::size_t offset, std::size_t count) const;

  LinearExpr relu(const LinearExpr& pre);
  LinearExpr abs(const LinearExpr& x);
  /// min(a, b) = a - ReLU(a - b).
  LinearExpr min(const LinearExpr& a, const LinearExpr& b);
  LinearExpr min_one(const LinearExpr& x) { return min(x, Rational(1)); }

  /// Inlines `f` on the given argument expressions.
  std::vector<LinearExpr> apply(const SimpleFunction& f, std::span<const LinearExpr> args);

  SimpleFunction compile(std::span<const LinearExpr> outputs) const;

 private:
  struct Unit {
    LinearExpr pre;
    std::size_t depth;
  };

  std::size_t depth_of(const LinearExpr& e) const;

  std::size_t input_dim_;
  std::vector<Unit> units_;
};

}  // namespace rgnn
