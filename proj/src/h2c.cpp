#include "rgnn/h2c.hpp"

#include <stdexcept>

#include "rgnn/builder.hpp"
#include "rgnn/model_io.hpp"

namespace rgnn {

Configuration Configuration::from_vector(const RationalVector& v, std::size_t d) {
  const ConfigLayout at{d};
  if (v.dim() != at.dim()) {
    throw std::invalid_argument("configuration has dimension " + std::to_string(v.dim()) +
                                ", expected " + std::to_string(at.dim()));
  }
  return Configuration{v.slice(at.kappa_c(), d), TrafficLight::from_vector(v.slice(at.tau_c(), 3)),
                       v.slice(at.kappa_m(), d), TrafficLight::from_vector(v.slice(at.tau_m(), 3))};
}

RationalVector Configuration::to_vector() const {
  const RationalVector parts[] = {kappa_c, tau_c.to_vector(), kappa_m, tau_m.to_vector()};
  return concat(parts);
}

namespace {

Rational dot(const RationalVector& x, const RationalVector& y) {
  Rational total;
  for (std::size_t i = 0; i < x.dim(); ++i) total += x[i] * y[i];
  return total;
}

void require_triple(const RationalVector& agg) {
  if (agg.dim() != 3) throw std::invalid_argument("light aggregate must have 3 components");
}

bool behind_raw(const RationalVector& tau_c, const RationalVector& agg_tau_c) {
  return dot(advance_permutation(tau_c), agg_tau_c).sign() > 0;
}

bool aligned_raw(const RationalVector& tau_c, const RationalVector& agg_tau_m) {
  RationalVector masked(3);
  for (std::size_t i = 0; i < 3; ++i) masked[i] = tau_c[i] * agg_tau_m[i];
  return l1_norm(masked) == l1_norm(agg_tau_m);
}

}  // namespace

bool predicate_behind(const TrafficLight& tau_c, const RationalVector& agg_tau_c) {
  require_triple(agg_tau_c);
  return behind_raw(tau_c.to_vector(), agg_tau_c);
}

bool predicate_behind(const Configuration& conf, const RationalVector& agg_tau_c) {
  return predicate_behind(conf.tau_c, agg_tau_c);
}

bool predicate_aligned(const TrafficLight& tau_c, const RationalVector& agg_tau_m) {
  require_triple(agg_tau_m);
  return aligned_raw(tau_c.to_vector(), agg_tau_m);
}

bool predicate_aligned(const Configuration& conf, const RationalVector& agg_tau_m) {
  return predicate_aligned(conf.tau_c, agg_tau_m);
}

bool predicate_eager(bool behind, bool halted) { return behind || !halted; }

bool predicate_eager(const Configuration& conf, const RationalVector& agg_tau_c,
                     const Classifier& halt) {
  return predicate_eager(predicate_behind(conf, agg_tau_c), halt(conf.kappa_c));
}

Rational phi_gadget(const Rational& delta, const Rational& s) {
  return relu(delta + s) - relu(delta) - relu(-delta + s) + relu(-delta);
}

ProtocolEvent protocol_event(const HaltingRGNN& source, const RationalVector& self,
                             const RationalVector& agg) {
  const ConfigLayout at{source.dim()};
  if (self.dim() != at.dim() || agg.dim() != at.dim()) {
    throw std::invalid_argument("protocol event needs configuration-sized inputs");
  }
  const auto tau_c = self.slice(at.tau_c(), 3);
  ProtocolEvent e;
  e.behind = behind_raw(tau_c, agg.slice(at.tau_c(), 3));
  e.aligned = aligned_raw(tau_c, agg.slice(at.tau_m(), 3));
  e.eager = predicate_eager(e.behind, source.halt(self.slice(at.kappa_c(), at.d)));
  e.advancing = e.aligned && e.eager;
  return e;
}

RationalVector general_combine(const HaltingRGNN& source, const RationalVector& self,
                               const RationalVector& agg) {
  const auto d = source.dim();
  const ConfigLayout at{d};
  const auto conf = Configuration::from_vector(self, d);
  if (agg.dim() != at.dim()) throw std::invalid_argument("aggregate has wrong dimension");
  const bool aligned = predicate_aligned(conf, agg.slice(at.tau_m(), 3));
  const bool eager = predicate_eager(conf, agg.slice(at.tau_c(), 3), source.halt);
  Configuration next{conf.kappa_c, conf.tau_c, conf.kappa_c, conf.tau_c};
  if (aligned && eager) {
    next.kappa_c = source.base.layer.combine(conf.kappa_c, agg.slice(at.kappa_m(), d));
    next.tau_c = adv(conf.tau_c);
  }
  return next.to_vector();
}

namespace {

// x -> (In(x), enc3(0), In(x), enc3(0)).
VectorMap config_init(const VectorMap& init, std::size_t d) {
  const auto light = enc3(0).to_vector();
  if (init.is_simple()) {
    NetworkBuilder b(init.input_dim());
    const auto y = b.apply(init.network(), b.inputs(0, init.input_dim()));
    std::vector<LinearExpr> out;
    for (int copy = 0; copy < 2; ++copy) {
      out.insert(out.end(), y.begin(), y.end());
      for (const auto& c : light) out.emplace_back(c);
    }
    return b.compile(out);
  }
  return VectorMap::External{"h2c:init", init.input_dim(), ConfigLayout{d}.dim(),
                             [init, light](const RationalVector& x) {
                               const auto y = init(x);
                               const RationalVector parts[] = {y, light, y, light};
                               return concat(parts);
                             }};
}

Classifier snapshot_readout(const Classifier& readout, std::size_t d) {
  const ConfigLayout at{d};
  if (readout.is_simple()) {
    NetworkBuilder b(at.dim());
    return SimpleClassifier(
        b.compile(b.apply(readout.simple().function(), b.inputs(at.kappa_c(), d))));
  }
  return Classifier::External{"h2c:readout", at.dim(), [readout, d](const RationalVector& x) {
                                return readout.score(x.slice(0, d));
                              }};
}

Probe event_probe(const HaltingRGNN& source) {
  return [source](const RationalVector& self, const RationalVector& agg) {
    return protocol_event(source, self, agg);
  };
}

Provenance provenance_for(const HaltingRGNN& source, std::string variant,
                          std::optional<Rational> bound) {
  Provenance p{"h2c", std::move(variant), std::move(bound), "", nullptr};
  try_attach_source(p, Model(source));
  return p;
}

}  // namespace

RGNN to_converging(const HaltingRGNN& source) {
  source.validate();
  const auto d = source.dim();
  const ConfigLayout at{d};
  const ACLayer src_layer = source.base.layer;

  Named<Aggregator> aggregate{"h2c:aggregate", [src_layer, at](const Multiset& m) {
                                Multiset kc, km;
                                RationalVector tc(3), tm(3);
                                for (const auto& [x, count] : m.entries()) {
                                  kc.add(x.slice(at.kappa_c(), at.d), count);
                                  km.add(x.slice(at.kappa_m(), at.d), count);
                                  for (std::size_t n = 0; n < count; ++n) {
                                    tc += x.slice(at.tau_c(), 3);
                                    tm += x.slice(at.tau_m(), 3);
                                  }
                                }
                                const RationalVector parts[] = {src_layer.aggregate(kc), tc,
                                                                src_layer.aggregate(km), tm};
                                return concat(parts);
                              }};
  Named<Combiner> combine{"h2c:combine",
                          [source](const RationalVector& self, const RationalVector& agg) {
                            return general_combine(source, self, agg);
                          }};
  auto layer = ACLayer::general(at.dim(), at.dim(), std::move(aggregate), std::move(combine))
                   .with_probe(event_probe(source));
  return RGNN{config_init(source.base.init, d), std::move(layer),
              snapshot_readout(source.base.readout, d),
              provenance_for(source, "general", std::nullopt)};
}

RGNN to_converging_simple(const HaltingRGNN& source, const Rational& bound) {
  source.validate();
  if (!source.is_simple()) {
    throw NotSimpleInput("h2c --simple needs a simple layer, readout and halting classifier");
  }
  if (bound.sign() < 0) throw std::invalid_argument("change bound must be non-negative");
  const auto d = source.dim();
  const ConfigLayout at{d};
  const std::size_t agg = at.dim();

  NetworkBuilder b(2 * at.dim());
  const auto kc = b.inputs(at.kappa_c(), d);
  const auto tc = b.inputs(at.tau_c(), 3);
  const auto agg_tc = b.inputs(agg + at.tau_c(), 3);
  const auto agg_km = b.inputs(agg + at.kappa_m(), d);
  const auto agg_tm = b.inputs(agg + at.tau_m(), 3);
  const std::vector<LinearExpr> adv_tc{tc[2], tc[0], tc[1]};

  // Lights are one-hot and light aggregates are counts, so each product with
  // a light component is a min against it.
  LinearExpr behind;
  for (std::size_t i = 0; i < 3; ++i) behind += b.min(adv_tc[i], agg_tc[i]);
  LinearExpr misaligned;
  for (std::size_t i = 0; i < 3; ++i) misaligned += b.min(Rational(1) - tc[i], agg_tm[i]);
  const LinearExpr aligned = Rational(1) - b.min_one(misaligned);

  const auto halt_score = b.apply(source.halt.simple().function(), kc)[0];
  const LinearExpr not_halted = (Rational(1) - halt_score) * Rational(1, 2);
  const LinearExpr eager = b.min_one(behind + not_halted);
  const LinearExpr advancing = b.relu(aligned + eager - Rational(1));

  const auto phi = [&b](const LinearExpr& delta, const LinearExpr& s) {
    return b.relu(delta + s) - b.relu(delta) - b.relu(-delta + s) + b.relu(-delta);
  };

  std::vector<LinearExpr> cmb_args = kc;
  cmb_args.insert(cmb_args.end(), agg_km.begin(), agg_km.end());
  const auto proposed = b.apply(source.base.layer.combine_network(), cmb_args);

  std::vector<LinearExpr> out;
  for (std::size_t i = 0; i < d; ++i) out.push_back(kc[i] + phi(proposed[i] - kc[i], advancing * bound));
  for (std::size_t i = 0; i < 3; ++i) out.push_back(tc[i] + phi(adv_tc[i] - tc[i], advancing));
  out.insert(out.end(), kc.begin(), kc.end());
  out.insert(out.end(), tc.begin(), tc.end());

  auto layer = ACLayer::simple(b.compile(out)).with_probe(event_probe(source));
  return RGNN{config_init(source.base.init, d), std::move(layer),
              snapshot_readout(source.base.readout, d), provenance_for(source, "simple", bound)};
}

}  // namespace rgnn
