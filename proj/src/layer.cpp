#include "rgnn/layer.hpp"

#include <stdexcept>

namespace rgnn {

ACLayer ACLayer::simple(SimpleFunction combine) {
  if (combine.input_dim() % 2 != 0) {
    throw std::invalid_argument("simple combination must read x | a of equal halves");
  }
  ACLayer layer;
  layer.kind_ = Kind::simple;
  layer.input_dim_ = combine.input_dim() / 2;
  layer.output_dim_ = combine.output_dim();
  layer.network_ = std::move(combine);
  return layer;
}

ACLayer ACLayer::general(std::size_t input_dim, std::size_t output_dim,
                         Named<Aggregator> aggregate, Named<Combiner> combine) {
  if (!aggregate.fn || !combine.fn) throw std::invalid_argument("general layer needs callbacks");
  ACLayer layer;
  layer.kind_ = Kind::general;
  layer.input_dim_ = input_dim;
  layer.output_dim_ = output_dim;
  layer.aggregate_ = std::move(aggregate.fn);
  layer.aggregation_name_ = std::move(aggregate.name);
  layer.combine_ = std::move(combine.fn);
  layer.combination_name_ = std::move(combine.name);
  return layer;
}

const SimpleFunction& ACLayer::combine_network() const {
  if (!network_) throw std::logic_error("general layer has no combination network");
  return *network_;
}

RationalVector ACLayer::aggregate(const Multiset& neighbours) const {
  if (kind_ == Kind::simple) return sum(neighbours, input_dim_);
  auto a = aggregate_(neighbours);
  if (a.dim() != input_dim_) throw std::invalid_argument("aggregation returned wrong dimension");
  return a;
}

RationalVector ACLayer::combine(const RationalVector& self, const RationalVector& agg) const {
  if (self.dim() != input_dim_ || agg.dim() != input_dim_) {
    throw std::invalid_argument("layer input has dimension " + std::to_string(self.dim()) +
                                ", expected " + std::to_string(input_dim_));
  }
  auto out = kind_ == Kind::simple ? (*network_)(concat(self, agg)) : combine_(self, agg);
  if (out.dim() != output_dim_) throw std::invalid_argument("combination returned wrong dimension");
  return out;
}

RationalVector ACLayer::aggregate_at(const LabelledGraph& g, std::size_t v) const {
  if (kind_ == Kind::simple) {
    RationalVector total(input_dim_);
    for (auto u : g.neighbours(v)) total += g.label(u);
    return total;
  }
  return aggregate(neighbourhood(g, v));
}

LabelledGraph ACLayer::apply(const LabelledGraph& g) const { return apply(g, nullptr); }

LabelledGraph ACLayer::apply(const LabelledGraph& g, std::vector<ProtocolEvent>* events) const {
  if (g.size() && g.label_dim() != input_dim_) {
    throw std::invalid_argument("graph label dimension " + std::to_string(g.label_dim()) +
                                " does not match layer input " + std::to_string(input_dim_));
  }
  std::vector<RationalVector> next;
  next.reserve(g.size());
  if (events) events->assign(g.size(), ProtocolEvent{});
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto agg = aggregate_at(g, v);
    if (events && probe_) (*events)[v] = probe_(g.label(v), agg);
    next.push_back(combine(g.label(v), agg));
  }
  return g.with_labels(std::move(next));
}

ACLayer ACLayer::with_probe(Probe probe) const {
  ACLayer copy = *this;
  copy.probe_ = std::move(probe);
  return copy;
}

ProtocolEvent ACLayer::probe(const RationalVector& self, const RationalVector& agg) const {
  if (!probe_) throw std::logic_error("layer has no probe attached");
  return probe_(self, agg);
}

LabelledGraph apply_ac_layer(const ACLayer& layer, const LabelledGraph& g) { return layer.apply(g); }

}  // namespace rgnn
