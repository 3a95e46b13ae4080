#include "rgnn/bisim.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "rgnn/random_graph.hpp"

namespace rgnn {

nlohmann::json relation_to_json(const VertexRelation& z) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [u, v] : z.pairs) pairs.push_back({u, v});
  return {{"pairs", pairs}};
}

VertexRelation relation_from_json(const nlohmann::json& j, const LabelledGraph& g,
                                  const LabelledGraph& h) {
  VertexRelation z;
  try {
    for (const auto& pair : j.at("pairs")) {
      if (!pair.is_array() || pair.size() != 2) throw ParseError("relation pairs must be [u, v]");
      auto u = pair[0].get<std::string>();
      auto v = pair[1].get<std::string>();
      if (!g.index_of(u)) throw ParseError("relation mentions unknown vertex '" + u + "' of G");
      if (!h.index_of(v)) throw ParseError("relation mentions unknown vertex '" + v + "' of H");
      z.pairs.emplace_back(std::move(u), std::move(v));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed relation JSON: ") + e.what());
  }
  return z;
}

namespace {

using IndexPairs = std::set<std::pair<std::size_t, std::size_t>>;

IndexPairs indices_of(const VertexRelation& z, const LabelledGraph& g, const LabelledGraph& h) {
  IndexPairs out;
  for (const auto& [u, v] : z.pairs) out.emplace(g.require_index(u), h.require_index(v));
  return out;
}

// Kuhn's augmenting paths on the bipartite graph left x right with `allowed`.
bool has_perfect_matching(std::span<const std::size_t> left, std::span<const std::size_t> right,
                          const std::function<bool(std::size_t, std::size_t)>& allowed) {
  if (left.size() != right.size()) return false;
  std::vector<std::ptrdiff_t> match_right(right.size(), -1);
  std::vector<bool> visited;
  std::function<bool(std::size_t)> augment = [&](std::size_t a) {
    for (std::size_t b = 0; b < right.size(); ++b) {
      if (visited[b] || !allowed(left[a], right[b])) continue;
      visited[b] = true;
      if (match_right[b] < 0 || augment(static_cast<std::size_t>(match_right[b]))) {
        match_right[b] = static_cast<std::ptrdiff_t>(a);
        return true;
      }
    }
    return false;
  };
  for (std::size_t a = 0; a < left.size(); ++a) {
    visited.assign(right.size(), false);
    if (!augment(a)) return false;
  }
  return true;
}

}  // namespace

BisimCheck check_graded_bisimulation(const LabelledGraph& g, const LabelledGraph& h,
                                     const VertexRelation& z) {
  const auto related = indices_of(z, g, h);
  const auto allowed = [&related](std::size_t a, std::size_t b) { return related.count({a, b}) > 0; };
  for (const auto& [u, v] : z.pairs) {
    const auto ui = g.require_index(u);
    const auto vi = h.require_index(v);
    const auto fail = [&](std::string reason) {
      return BisimCheck{false, std::make_pair(u, v), std::move(reason)};
    };
    if (g.label(ui) != h.label(vi)) return fail("labels differ");
    if (g.degree(ui) != h.degree(vi)) return fail("neighbourhood sizes differ");
    if (!has_perfect_matching(g.neighbours(ui), h.neighbours(vi), allowed)) {
      return fail("no bijection between neighbourhoods inside the relation");
    }
  }
  return {};
}

bool is_totally_surjective(const VertexRelation& z, const LabelledGraph& g, const LabelledGraph& h) {
  std::vector<bool> left(g.size(), false), right(h.size(), false);
  for (const auto& [u, v] : z.pairs) {
    left[g.require_index(u)] = true;
    right[h.require_index(v)] = true;
  }
  return std::all_of(left.begin(), left.end(), [](bool b) { return b; }) &&
         std::all_of(right.begin(), right.end(), [](bool b) { return b; });
}

std::vector<std::vector<std::pair<int, std::string>>> Partition::blocks(const LabelledGraph& g,
                                                                        const LabelledGraph& h) const {
  std::vector<std::vector<std::pair<int, std::string>>> out(block_count);
  for (std::size_t v = 0; v < block_g.size(); ++v) out[block_g[v]].emplace_back(0, g.id(v));
  for (std::size_t v = 0; v < block_h.size(); ++v) out[block_h[v]].emplace_back(1, h.id(v));
  return out;
}

namespace {

// Renumbers signatures in sorted order so block ids do not depend on vertex order.
template <class Key>
Partition number_blocks(const std::vector<Key>& keys_g, const std::vector<Key>& keys_h) {
  std::map<Key, std::size_t> ids;
  for (const auto& k : keys_g) ids.emplace(k, 0);
  for (const auto& k : keys_h) ids.emplace(k, 0);
  std::size_t next = 0;
  for (auto& [k, id] : ids) id = next++;
  Partition p;
  p.block_count = ids.size();
  for (const auto& k : keys_g) p.block_g.push_back(ids.at(k));
  for (const auto& k : keys_h) p.block_h.push_back(ids.at(k));
  return p;
}

}  // namespace

Partition label_partition(const LabelledGraph& g, const LabelledGraph& h) {
  if (g.size() && h.size() && g.label_dim() != h.label_dim()) {
    throw std::invalid_argument("graphs have different label dimensions");
  }
  return number_blocks(g.labels(), h.labels());
}

Partition refinement_round(const LabelledGraph& g, const LabelledGraph& h, const Partition& p) {
  using Signature = std::pair<std::size_t, std::vector<std::size_t>>;
  const auto signatures = [](const LabelledGraph& graph, const std::vector<std::size_t>& block) {
    std::vector<Signature> out;
    out.reserve(graph.size());
    for (std::size_t v = 0; v < graph.size(); ++v) {
      std::vector<std::size_t> around;
      for (auto u : graph.neighbours(v)) around.push_back(block[u]);
      std::sort(around.begin(), around.end());
      out.emplace_back(block[v], std::move(around));
    }
    return out;
  };
  return number_blocks(signatures(g, p.block_g), signatures(h, p.block_h));
}

Partition coarsest_graded_bisimulation(const LabelledGraph& g, const LabelledGraph& h) {
  auto p = label_partition(g, h);
  while (true) {
    auto next = refinement_round(g, h, p);
    if (next.block_count == p.block_count) return next;
    p = std::move(next);
  }
}

VertexRelation relation_of(const Partition& p, const LabelledGraph& g, const LabelledGraph& h) {
  VertexRelation z;
  for (std::size_t u = 0; u < g.size(); ++u) {
    for (std::size_t v = 0; v < h.size(); ++v) {
      if (p.block_g[u] == p.block_h[v]) z.pairs.emplace_back(g.id(u), h.id(v));
    }
  }
  return z;
}

nlohmann::json partition_to_json(const Partition& p, const LabelledGraph& g, const LabelledGraph& h) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& block : p.blocks(g, h)) {
    nlohmann::json members = nlohmann::json::array();
    for (const auto& [side, id] : block) members.push_back({side == 0 ? "G" : "H", id});
    blocks.push_back(members);
  }
  return {{"blocks", blocks}};
}

BisimCheck check_transformer_invariance(const LabelTransformer& f, const LabelledGraph& g,
                                        const LabelledGraph& h, const VertexRelation& z) {
  if (auto pre = check_graded_bisimulation(g, h, z); !pre) {
    throw std::invalid_argument("relation is not a graded bisimulation of the inputs: " + pre.reason);
  }
  return check_graded_bisimulation(f(g), f(h), z);
}

BisimilarPair cycle_cover(std::size_t n, std::size_t k, std::vector<RationalVector> labels) {
  if (n < 3 || k == 0) throw std::invalid_argument("cycle cover needs n >= 3 and k >= 1");
  if (labels.empty()) labels.assign(n, RationalVector{0});
  if (labels.size() != n) throw std::invalid_argument("cycle cover needs one label per base vertex");
  std::vector<RationalVector> big;
  for (std::size_t i = 0; i < k * n; ++i) big.push_back(labels[i % n]);
  BisimilarPair out{cycle_graph(big), cycle_graph(labels), {}};
  for (std::size_t i = 0; i < k * n; ++i) out.relation.pairs.emplace_back(out.g.id(i), out.h.id(i % n));
  return out;
}

BisimilarPair duplication(const LabelledGraph& g) {
  BisimilarPair out{g, disjoint_union(g, g, "'"), {}};
  for (std::size_t v = 0; v < g.size(); ++v) {
    out.relation.pairs.emplace_back(g.id(v), out.h.id(v));
    out.relation.pairs.emplace_back(g.id(v), out.h.id(g.size() + v));
  }
  return out;
}

namespace {

std::vector<std::size_t> random_permutation(std::size_t k, std::mt19937_64& rng) {
  std::vector<std::size_t> perm(k);
  for (std::size_t i = 0; i < k; ++i) perm[i] = i;
  for (std::size_t i = k; i > 1; --i) std::swap(perm[i - 1], perm[draw_below(rng, i)]);
  return perm;
}

}  // namespace

BisimilarPair covering_lift(const LabelledGraph& base, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw std::invalid_argument("covering lift needs k >= 1");
  std::mt19937_64 rng(seed);
  const auto at = [k](std::size_t v, std::size_t i) { return v * k + i; };
  std::vector<std::string> ids;
  std::vector<RationalVector> labels;
  for (std::size_t v = 0; v < base.size(); ++v) {
    for (std::size_t i = 0; i < k; ++i) {
      ids.push_back(base.id(v) + "#" + std::to_string(i));
      labels.push_back(base.label(v));
    }
  }
  std::vector<LabelledGraph::Edge> edges;
  for (const auto& [u, v] : base.edges()) {
    auto perm = random_permutation(k, rng);
    if (u != v) {
      for (std::size_t i = 0; i < k; ++i) edges.emplace_back(at(u, i), at(v, perm[i]));
      continue;
    }
    // Involution: fixed points become loops, swapped pairs become edges.
    for (std::size_t i = 0; i < k;) {
      if (i + 1 < k && draw_below(rng, 2) == 1) {
        edges.emplace_back(at(v, perm[i]), at(v, perm[i + 1]));
        i += 2;
      } else {
        edges.emplace_back(at(v, perm[i]), at(v, perm[i]));
        i += 1;
      }
    }
  }
  BisimilarPair out{base, LabelledGraph(std::move(ids), std::move(labels), edges, base.label_dim()), {}};
  for (std::size_t v = 0; v < base.size(); ++v) {
    for (std::size_t i = 0; i < k; ++i) out.relation.pairs.emplace_back(base.id(v), out.h.id(at(v, i)));
  }
  return out;
}

BisimilarPair generate_bisimilar_pair(std::uint64_t seed, std::size_t n,
                                      const std::vector<RationalVector>& palette) {
  std::mt19937_64 rng(seed);
  RandomGraphParams params{n, Rational(1, 2), Rational(1, 4), palette};
  switch (draw_below(rng, 3)) {
    case 0: {
      auto base = random_graph(params, rng);
      return covering_lift(base, 2 + draw_below(rng, 2), rng());
    }
    case 1:
      return duplication(random_graph(params, rng));
    default: {
      const std::size_t m = std::max<std::size_t>(3, n);
      std::vector<RationalVector> labels;
      const std::vector<RationalVector> fallback{RationalVector{0}};
      const auto& pal = palette.empty() ? fallback : palette;
      for (std::size_t i = 0; i < m; ++i) labels.push_back(pal[draw_below(rng, pal.size())]);
      return cycle_cover(m, 2 + draw_below(rng, 2), labels);
    }
  }
}

}  // namespace rgnn
