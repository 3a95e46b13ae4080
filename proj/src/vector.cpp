#include "rgnn/vector.hpp"

#include <ostream>
#include <stdexcept>

namespace rgnn {

RationalVector RationalVector::ones(std::size_t dim) {
  RationalVector v(dim);
  for (auto& c : v) c = 1;
  return v;
}

RationalVector RationalVector::slice(std::size_t offset, std::size_t length) const {
  if (offset + length > dim()) throw std::out_of_range("vector slice out of range");
  return RationalVector(std::vector<Rational>(components_.begin() + offset,
                                              components_.begin() + offset + length));
}

RationalVector& RationalVector::operator+=(const RationalVector& rhs) {
  if (rhs.dim() != dim()) throw std::invalid_argument("vector dimension mismatch in +");
  for (std::size_t i = 0; i < dim(); ++i) components_[i] += rhs[i];
  return *this;
}

RationalVector& RationalVector::operator-=(const RationalVector& rhs) {
  if (rhs.dim() != dim()) throw std::invalid_argument("vector dimension mismatch in -");
  for (std::size_t i = 0; i < dim(); ++i) components_[i] -= rhs[i];
  return *this;
}

std::strong_ordering operator<=>(const RationalVector& lhs, const RationalVector& rhs) {
  if (auto c = lhs.dim() <=> rhs.dim(); c != 0) return c;
  for (std::size_t i = 0; i < lhs.dim(); ++i) {
    if (auto c = lhs[i] <=> rhs[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::string RationalVector::str() const {
  std::string out = "(";
  for (std::size_t i = 0; i < dim(); ++i) {
    if (i) out += ", ";
    out += components_[i].str();
  }
  return out + ")";
}

RationalVector concat(const RationalVector& x, const RationalVector& y) {
  std::vector<Rational> out;
  out.reserve(x.dim() + y.dim());
  out.insert(out.end(), x.begin(), x.end());
  out.insert(out.end(), y.begin(), y.end());
  return RationalVector(std::move(out));
}

RationalVector concat(std::span<const RationalVector> parts) {
  std::vector<Rational> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return RationalVector(std::move(out));
}

Rational l1_norm(const RationalVector& x) {
  Rational total;
  for (const auto& c : x) total += abs(c);
  return total;
}

std::ostream& operator<<(std::ostream& os, const RationalVector& x) { return os << x.str(); }

nlohmann::json to_json(const Rational& x) { return x.str(); }

nlohmann::json to_json(const RationalVector& x) {
  auto j = nlohmann::json::array();
  for (const auto& c : x) j.push_back(c.str());
  return j;
}

Rational rational_from_json(const nlohmann::json& j) {
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw ParseError("expected a rational string, got " + j.dump());
}

RationalVector vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("expected an array of rationals, got " + j.dump());
  std::vector<Rational> out;
  out.reserve(j.size());
  for (const auto& c : j) out.push_back(rational_from_json(c));
  return RationalVector(std::move(out));
}

}  // namespace rgnn
