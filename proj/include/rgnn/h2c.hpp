#pragma once

#include <cstddef>

#include "rgnn/model.hpp"
#include "rgnn/traffic_light.hpp"

namespace rgnn {

/// Feature of the derived converging model: current snapshot and light,
/// then the advertised snapshot and light, laid out in that order.
struct Configuration {
  RationalVector kappa_c;
  TrafficLight tau_c = enc3(0);
  RationalVector kappa_m;
  TrafficLight tau_m = enc3(0);

  static std::size_t dim_for(std::size_t d) { return 2 * d + 6; }

  /// Splits a (2d + 6)-vector. Throws std::invalid_argument on a wrong
  /// dimension or a light that is not one-hot.
  static Configuration from_vector(const RationalVector& v, std::size_t d);
  RationalVector to_vector() const;

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// Offsets of the four blocks inside a configuration of snapshot dimension d.
struct ConfigLayout {
  std::size_t d;

  std::size_t kappa_c() const { return 0; }
  std::size_t tau_c() const { return d; }
  std::size_t kappa_m() const { return d + 3; }
  std::size_t tau_m() const { return 2 * d + 3; }
  std::size_t dim() const { return 2 * d + 6; }
};

/// Some neighbour's current light is one phase ahead of ours.
bool predicate_behind(const TrafficLight& tau_c, const RationalVector& agg_tau_c);
bool predicate_behind(const Configuration& conf, const RationalVector& agg_tau_c);

/// Every neighbour advertises our current light.
bool predicate_aligned(const TrafficLight& tau_c, const RationalVector& agg_tau_m);
bool predicate_aligned(const Configuration& conf, const RationalVector& agg_tau_m);

bool predicate_eager(bool behind, bool halted);
bool predicate_eager(const Configuration& conf, const RationalVector& agg_tau_c,
                     const Classifier& halt);

/// ReLU(d + s) - ReLU(d) - ReLU(-d + s) + ReLU(-d): 0 at s = 0 and d once s >= |d|.
Rational phi_gadget(const Rational& delta, const Rational& s);

/// Decision record for one vertex of a derived model, computed from the raw
/// configuration and aggregate (lights are not required to be one-hot).
ProtocolEvent protocol_event(const HaltingRGNN& source, const RationalVector& self,
                             const RationalVector& agg);

/// The two-case combination: advance to (CMB(kc, agg km), adv(tc), kc, tc)
/// or wait at (kc, tc, kc, tc). Rejects lights that are not one-hot.
RationalVector general_combine(const HaltingRGNN& source, const RationalVector& self,
                               const RationalVector& agg);

/// Converging model of dimension 2d + 6 running the traffic-light protocol
/// over `source`. The layer carries a probe that reports protocol events.
RGNN to_converging(const HaltingRGNN& source);

/// The same protocol compiled to one ReLU network. `bound` caps the per-step
/// change of any snapshot component. Throws NotSimpleInput unless the
/// source layer, readout and halting classifier are simple, and
/// std::invalid_argument for a negative bound.
RGNN to_converging_simple(const HaltingRGNN& source, const Rational& bound);

}  // namespace rgnn
