#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rgnn/graph.hpp"

namespace rgnn {

/// Relation between the vertices of two graphs, as pairs of vertex ids.
struct VertexRelation {
  std::vector<std::pair<std::string, std::string>> pairs;

  friend bool operator==(const VertexRelation&, const VertexRelation&) = default;
};

/// Relation JSON: {"pairs":[["u1","v1"],...]}. Throws ParseError when an id
/// is not a vertex of the respective graph.
nlohmann::json relation_to_json(const VertexRelation& z);
VertexRelation relation_from_json(const nlohmann::json& j, const LabelledGraph& g,
                                  const LabelledGraph& h);

struct BisimCheck {
  bool ok = true;
  /// First pair that fails, with the reason.
  std::optional<std::pair<std::string, std::string>> violation;
  std::string reason;

  explicit operator bool() const { return ok; }
};

/// Checks every pair: equal labels and a bijection between the two
/// neighbourhoods that stays inside the relation.
BisimCheck check_graded_bisimulation(const LabelledGraph& g, const LabelledGraph& h,
                                     const VertexRelation& z);

/// Domain covers every vertex of g and range every vertex of h.
bool is_totally_surjective(const VertexRelation& z, const LabelledGraph& g, const LabelledGraph& h);

/// Partition of the disjoint union of two graphs.
struct Partition {
  std::vector<std::size_t> block_g;
  std::vector<std::size_t> block_h;
  std::size_t block_count = 0;

  /// Blocks as lists of (side, vertex id) with side 0 for g and 1 for h.
  std::vector<std::vector<std::pair<int, std::string>>> blocks(const LabelledGraph& g,
                                                               const LabelledGraph& h) const;

  friend bool operator==(const Partition&, const Partition&) = default;
};

/// Initial partition by label, canonically numbered.
Partition label_partition(const LabelledGraph& g, const LabelledGraph& h);

/// Splits blocks by the multiset of neighbour blocks, canonically numbered.
Partition refinement_round(const LabelledGraph& g, const LabelledGraph& h, const Partition& p);

/// Stable colour refinement: two vertices share a block iff they are
/// graded bisimilar.
Partition coarsest_graded_bisimulation(const LabelledGraph& g, const LabelledGraph& h);

/// Every (u, v) with u in g and v in h in the same block.
VertexRelation relation_of(const Partition& p, const LabelledGraph& g, const LabelledGraph& h);

nlohmann::json partition_to_json(const Partition& p, const LabelledGraph& g, const LabelledGraph& h);

using LabelTransformer = std::function<LabelledGraph(const LabelledGraph&)>;

/// Applies `f` to both graphs and re-checks `z` on the results. Throws
/// std::invalid_argument when `z` is not a graded bisimulation of the inputs.
BisimCheck check_transformer_invariance(const LabelTransformer& f, const LabelledGraph& g,
                                        const LabelledGraph& h, const VertexRelation& z);

struct BisimilarPair {
  LabelledGraph g;
  LabelledGraph h;
  VertexRelation relation;
};

/// C_{kn} and C_n with vertex i related to i mod n. `labels` (size n, or
/// empty for the uniform label (0)) are copied around the cover.
BisimilarPair cycle_cover(std::size_t n, std::size_t k, std::vector<RationalVector> labels = {});

/// g and g disjoint-union g, each vertex related to both of its copies.
BisimilarPair duplication(const LabelledGraph& g);

/// k-fold covering lift of `base`: vertex v becomes v#0 .. v#(k-1), each
/// edge is lifted along a random permutation and each self-loop along a
/// random involution. The relation maps every vertex of `base` to its fibre.
BisimilarPair covering_lift(const LabelledGraph& base, std::size_t k, std::uint64_t seed);

/// Seeded generator mixing covering lifts of random graphs, duplications and
/// cycle covers.
BisimilarPair generate_bisimilar_pair(std::uint64_t seed, std::size_t n,
                                      const std::vector<RationalVector>& palette);

}  // namespace rgnn
