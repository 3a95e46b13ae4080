#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>

#include "rgnn/graph.hpp"
#include "rgnn/network.hpp"

namespace rgnn {

/// Per-vertex decision record emitted by instrumented layers.
struct ProtocolEvent {
  bool advancing = false;
  bool behind = false;
  bool aligned = false;
  bool eager = false;

  friend bool operator==(const ProtocolEvent&, const ProtocolEvent&) = default;
};

using Aggregator = std::function<RationalVector(const Multiset&)>;
using Combiner = std::function<RationalVector(const RationalVector& self, const RationalVector& agg)>;
/// Observes (own feature, aggregate) before combination.
using Probe = std::function<ProtocolEvent(const RationalVector& self, const RationalVector& agg)>;

/// Host callback with a name, used for models that are not plain networks.
template <class Fn>
struct Named {
  std::string name;
  Fn fn;
};

/// Aggregate-combine layer R^p -> R^q.
///
/// Simple layers aggregate by summation (zero vector for no neighbours) and
/// combine with a network on x | a. General layers take both steps as
/// callbacks; the aggregation sees the full neighbour multiset.
class ACLayer {
 public:
  enum class Kind { simple, general };

  /// `combine` maps R^{2p} -> R^q.
  static ACLayer simple(SimpleFunction combine);
  static ACLayer general(std::size_t input_dim, std::size_t output_dim, Named<Aggregator> aggregate,
                         Named<Combiner> combine);

  Kind kind() const { return kind_; }
  bool is_simple() const { return kind_ == Kind::simple; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return output_dim_; }

  /// The combination network; only for simple layers.
  const SimpleFunction& combine_network() const;
  const std::string& aggregation_name() const { return aggregation_name_; }
  const std::string& combination_name() const { return combination_name_; }

  RationalVector aggregate(const Multiset& neighbours) const;
  RationalVector combine(const RationalVector& self, const RationalVector& agg) const;

  /// Aggregate of the neighbour labels of `v` in `g`.
  RationalVector aggregate_at(const LabelledGraph& g, std::size_t v) const;

  /// L(G): new label CMB(G(v), AGG(neighbours)) at every vertex.
  LabelledGraph apply(const LabelledGraph& g) const;

  /// Like apply, also collecting probe events when a probe is attached.
  LabelledGraph apply(const LabelledGraph& g, std::vector<ProtocolEvent>* events) const;

  ACLayer with_probe(Probe probe) const;
  bool has_probe() const { return static_cast<bool>(probe_); }
  ProtocolEvent probe(const RationalVector& self, const RationalVector& agg) const;

 private:
  ACLayer() = default;

  Kind kind_ = Kind::simple;
  std::size_t input_dim_ = 0;
  std::size_t output_dim_ = 0;
  std::optional<SimpleFunction> network_;
  Aggregator aggregate_;
  Combiner combine_;
  std::string aggregation_name_ = "sum";
  std::string combination_name_;
  Probe probe_;
};

/// Applies `layer` to `g`.
LabelledGraph apply_ac_layer(const ACLayer& layer, const LabelledGraph& g);

}  // namespace rgnn
