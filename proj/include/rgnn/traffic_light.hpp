#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "rgnn/vector.hpp"

namespace rgnn {

/// One-hot phase token in {(1,0,0), (0,1,0), (0,0,1)}: which halting index
/// a vertex simulates, modulo 3.
class TrafficLight {
 public:
  /// enc3: (1,0,0), (0,1,0), (0,0,1) for i = 0, 1, 2 mod 3.
  static TrafficLight encode(std::size_t i) { return TrafficLight(i % 3); }

  /// Throws std::invalid_argument unless `v` is one of the three one-hot vectors.
  static TrafficLight from_vector(const RationalVector& v);

  /// adv(g, y, r) = (r, g, y).
  TrafficLight advance() const { return TrafficLight((phase_ + 1) % 3); }
  /// ret(g, y, r) = (y, r, g).
  TrafficLight retreat() const { return TrafficLight((phase_ + 2) % 3); }

  /// Index of the 1.
  std::size_t phase() const { return phase_; }
  RationalVector to_vector() const;
  std::string str() const { return to_vector().str(); }

  friend bool operator==(const TrafficLight&, const TrafficLight&) = default;

 private:
  explicit TrafficLight(std::size_t phase) : phase_(phase) {}
  std::size_t phase_;
};

inline TrafficLight enc3(std::size_t i) { return TrafficLight::encode(i); }
inline TrafficLight adv(const TrafficLight& t) { return t.advance(); }
inline TrafficLight ret(const TrafficLight& t) { return t.retreat(); }

/// The adv permutation on arbitrary 3-vectors (linear, no one-hot check).
RationalVector advance_permutation(const RationalVector& t);

}  // namespace rgnn
