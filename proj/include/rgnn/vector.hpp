#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rgnn/rational.hpp"

namespace rgnn {

/// Feature vector over exact rationals.
class RationalVector {
 public:
  RationalVector() = default;
  explicit RationalVector(std::size_t dim) : components_(dim) {}
  RationalVector(std::initializer_list<Rational> values) : components_(values) {}
  explicit RationalVector(std::vector<Rational> values) : components_(std::move(values)) {}

  static RationalVector zeros(std::size_t dim) { return RationalVector(dim); }
  static RationalVector ones(std::size_t dim);

  std::size_t dim() const { return components_.size(); }
  bool empty() const { return components_.empty(); }

  Rational& operator[](std::size_t i) { return components_[i]; }
  const Rational& operator[](std::size_t i) const { return components_[i]; }

  auto begin() const { return components_.begin(); }
  auto end() const { return components_.end(); }
  auto begin() { return components_.begin(); }
  auto end() { return components_.end(); }

  const std::vector<Rational>& components() const { return components_; }

  /// Components [offset, offset + length).
  RationalVector slice(std::size_t offset, std::size_t length) const;

  RationalVector& operator+=(const RationalVector& rhs);
  RationalVector& operator-=(const RationalVector& rhs);

  friend RationalVector operator+(RationalVector lhs, const RationalVector& rhs) {
    return lhs += rhs;
  }
  friend RationalVector operator-(RationalVector lhs, const RationalVector& rhs) {
    return lhs -= rhs;
  }

  friend bool operator==(const RationalVector&, const RationalVector&) = default;
  friend std::strong_ordering operator<=>(const RationalVector& lhs, const RationalVector& rhs);

  /// Canonical text form, e.g. "(1/2, -3)".
  std::string str() const;

 private:
  std::vector<Rational> components_;
};

/// x | y.
RationalVector concat(const RationalVector& x, const RationalVector& y);
RationalVector concat(std::span<const RationalVector> parts);

/// Sum of absolute component values.
Rational l1_norm(const RationalVector& x);

std::ostream& operator<<(std::ostream& os, const RationalVector& x);

/// JSON form: array of rational strings. Integers in the input are accepted.
nlohmann::json to_json(const Rational& x);
nlohmann::json to_json(const RationalVector& x);
Rational rational_from_json(const nlohmann::json& j);
RationalVector vector_from_json(const nlohmann::json& j);

}  // namespace rgnn
