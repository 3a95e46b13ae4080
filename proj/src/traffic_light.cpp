#include "rgnn/traffic_light.hpp"

#include <stdexcept>

namespace rgnn {

TrafficLight TrafficLight::from_vector(const RationalVector& v) {
  if (v.dim() == 3) {
    std::size_t ones = 0, zeros = 0, phase = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      if (v[i] == Rational(1)) {
        ++ones;
        phase = i;
      } else if (v[i].is_zero()) {
        ++zeros;
      }
    }
    if (ones == 1 && zeros == 2) return TrafficLight(phase);
  }
  throw std::invalid_argument("not a traffic light (one-hot 3-vector): " + v.str());
}

RationalVector TrafficLight::to_vector() const {
  RationalVector v(3);
  v[phase_] = 1;
  return v;
}

RationalVector advance_permutation(const RationalVector& t) {
  if (t.dim() != 3) throw std::invalid_argument("traffic light vectors have 3 components");
  return RationalVector{t[2], t[0], t[1]};
}

}  // namespace rgnn
