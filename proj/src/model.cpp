#include "rgnn/model.hpp"

#include <stdexcept>

namespace rgnn {

VectorMap::VectorMap(External e) : impl_(std::move(e)) {
  if (!std::get<External>(impl_).fn) throw std::invalid_argument("external map without callback");
}

std::size_t VectorMap::input_dim() const {
  return is_simple() ? network().input_dim() : external().input_dim;
}

std::size_t VectorMap::output_dim() const {
  return is_simple() ? network().output_dim() : external().output_dim;
}

RationalVector VectorMap::operator()(const RationalVector& x) const {
  if (x.dim() != input_dim()) {
    throw std::invalid_argument("map input has dimension " + std::to_string(x.dim()) +
                                ", expected " + std::to_string(input_dim()));
  }
  auto y = is_simple() ? network()(x) : external().fn(x);
  if (y.dim() != output_dim()) throw std::invalid_argument("map returned wrong dimension");
  return y;
}

Classifier::Classifier(External e) : impl_(std::move(e)) {
  if (!std::get<External>(impl_).score) {
    throw std::invalid_argument("external classifier without callback");
  }
}

std::size_t Classifier::input_dim() const {
  return is_simple() ? simple().input_dim() : external().input_dim;
}

Rational Classifier::score(const RationalVector& x) const {
  if (x.dim() != input_dim()) {
    throw std::invalid_argument("classifier input has dimension " + std::to_string(x.dim()) +
                                ", expected " + std::to_string(input_dim()));
  }
  return is_simple() ? simple().score(x) : external().score(x);
}

void RGNN::validate() const {
  const auto d = dim();
  if (init.output_dim() != d) throw std::invalid_argument("initialisation output dim != layer dim");
  if (layer.output_dim() != d) throw std::invalid_argument("layer must map R^d to R^d");
  if (readout.input_dim() != d) throw std::invalid_argument("readout input dim != layer dim");
}

void HaltingRGNN::validate() const {
  base.validate();
  if (halt.input_dim() != dim()) throw std::invalid_argument("halting classifier input dim != d");
}

}  // namespace rgnn
