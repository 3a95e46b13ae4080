#include "rgnn/c2h.hpp"

#include <stdexcept>

#include "rgnn/builder.hpp"
#include "rgnn/model_io.hpp"

namespace rgnn {

namespace {

void require_positive_dim(const RGNN& source) {
  source.validate();
  if (source.dim() == 0) throw std::invalid_argument("state dimension must be at least 1");
}

// x -> In(x) | (In(x) + 1).
VectorMap stacked_init(const VectorMap& init, std::size_t d) {
  if (init.is_simple()) {
    NetworkBuilder b(init.input_dim());
    const auto args = b.inputs(0, init.input_dim());
    auto y = b.apply(init.network(), args);
    std::vector<LinearExpr> out = y;
    for (const auto& e : y) out.push_back(e + Rational(1));
    return b.compile(out);
  }
  return VectorMap::External{"c2h:init", init.input_dim(), 2 * d, [init](const RationalVector& x) {
                               auto y = init(x);
                               return concat(y, y + RationalVector::ones(y.dim()));
                             }};
}

// y | y' -> Out(y).
Classifier first_block_readout(const Classifier& readout, std::size_t d) {
  if (readout.is_simple()) {
    NetworkBuilder b(2 * d);
    const auto y = b.inputs(0, d);
    return SimpleClassifier(b.compile(b.apply(readout.simple().function(), y)));
  }
  return Classifier::External{"c2h:readout", 2 * d, [readout, d](const RationalVector& x) {
                                return readout.score(x.slice(0, d));
                              }};
}

Provenance provenance_for(const RGNN& source, std::string variant) {
  Provenance p{"c2h", std::move(variant), std::nullopt, "", nullptr};
  try_attach_source(p, Model(source));
  return p;
}

}  // namespace

HaltingRGNN to_halting(const RGNN& source) {
  require_positive_dim(source);
  const auto d = source.dim();
  const ACLayer src_layer = source.layer;

  Named<Aggregator> aggregate{"c2h:aggregate", [src_layer, d](const Multiset& m) {
                                Multiset first;
                                for (const auto& [x, count] : m.entries()) first.add(x.slice(0, d), count);
                                return concat(src_layer.aggregate(first), RationalVector::zeros(d));
                              }};
  Named<Combiner> combine{"c2h:combine",
                          [src_layer, d](const RationalVector& self, const RationalVector& agg) {
                            const auto y = self.slice(0, d);
                            return concat(src_layer.combine(y, agg.slice(0, d)), y);
                          }};
  Classifier halt = Classifier::External{"c2h:halt", 2 * d, [d](const RationalVector& x) {
                                           return -l1_norm(x.slice(0, d) - x.slice(d, d));
                                         }};

  RGNN base{stacked_init(source.init, d),
            ACLayer::general(2 * d, 2 * d, std::move(aggregate), std::move(combine)),
            first_block_readout(source.readout, d), provenance_for(source, "general")};
  return HaltingRGNN{std::move(base), std::move(halt)};
}

HaltingRGNN to_halting_simple(const RGNN& source) {
  require_positive_dim(source);
  if (!source.is_simple()) {
    throw NotSimpleInput("c2h --simple needs a simple layer and readout");
  }
  const auto d = source.dim();

  // Combination input: y | y' | a | a'.
  NetworkBuilder comb(4 * d);
  std::vector<LinearExpr> args = comb.inputs(0, d);
  for (auto& e : comb.inputs(2 * d, d)) args.push_back(std::move(e));
  auto out = comb.apply(source.layer.combine_network(), args);
  for (auto& e : comb.inputs(0, d)) out.push_back(std::move(e));

  NetworkBuilder halt(2 * d);
  LinearExpr score;
  for (std::size_t i = 0; i < d; ++i) score -= halt.abs(halt.input(i) - halt.input(d + i));
  const std::vector<LinearExpr> score_out{score};

  RGNN base{stacked_init(source.init, d), ACLayer::simple(comb.compile(out)),
            first_block_readout(source.readout, d), provenance_for(source, "simple")};
  return HaltingRGNN{std::move(base), SimpleClassifier(halt.compile(score_out))};
}

}  // namespace rgnn
