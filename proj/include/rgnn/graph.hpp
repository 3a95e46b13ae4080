#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rgnn/vector.hpp"

namespace rgnn {

/// Finite multiset of feature vectors.
class Multiset {
 public:
  void add(const RationalVector& x, std::size_t count = 1);

  std::size_t multiplicity(const RationalVector& x) const;
  /// Total number of elements, counted with multiplicity.
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  const std::map<RationalVector, std::size_t>& entries() const { return entries_; }

  friend bool operator==(const Multiset&, const Multiset&) = default;

 private:
  std::map<RationalVector, std::size_t> entries_;
  std::size_t size_ = 0;
};

/// Componentwise sum over the multiset; the zero vector of `dim` when empty.
RationalVector sum(const Multiset& m, std::size_t dim);

/// Finite undirected graph with one rational vector label per vertex.
///
/// The vertex set and adjacency are shared between graphs produced by
/// `with_labels`, so a run over many feature graphs stores the structure once.
/// A self-loop puts the vertex in its own neighbourhood once.
class LabelledGraph {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  LabelledGraph() : LabelledGraph({}, {}, {}, 0) {}

  /// Edges are unordered pairs of vertex indices; duplicates and both
  /// orientations collapse to one edge. `label_dim` is only consulted when
  /// there are no vertices.
  LabelledGraph(std::vector<std::string> ids, std::vector<RationalVector> labels,
                const std::vector<Edge>& edges, std::size_t label_dim = 0);

  std::size_t size() const { return labels_.size(); }
  std::size_t label_dim() const { return label_dim_; }

  const std::string& id(std::size_t v) const { return structure_->ids[v]; }
  const std::vector<std::string>& ids() const { return structure_->ids; }
  std::optional<std::size_t> index_of(std::string_view id) const;
  /// Throws std::out_of_range for unknown ids.
  std::size_t require_index(std::string_view id) const;

  const RationalVector& label(std::size_t v) const { return labels_[v]; }
  const std::vector<RationalVector>& labels() const { return labels_; }

  std::span<const std::size_t> neighbours(std::size_t v) const {
    return structure_->adjacency[v];
  }
  std::size_t degree(std::size_t v) const { return structure_->adjacency[v].size(); }
  bool adjacent(std::size_t u, std::size_t v) const;

  /// Canonical edge list: (u, v) with u <= v, sorted.
  const std::vector<Edge>& edges() const { return structure_->edges; }

  /// Connected component index of every vertex, numbered by first vertex.
  const std::vector<std::size_t>& component_of() const { return structure_->component; }
  std::size_t component_count() const { return structure_->component_count; }
  /// Vertices of each component, in vertex order.
  std::vector<std::vector<std::size_t>> components() const;

  /// Same vertices and edges with new labels of a uniform dimension.
  LabelledGraph with_labels(std::vector<RationalVector> labels) const;

  bool same_structure(const LabelledGraph& other) const;

  friend bool operator==(const LabelledGraph& lhs, const LabelledGraph& rhs);

 private:
  struct Structure {
    std::vector<std::string> ids;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::vector<std::size_t>> adjacency;
    std::vector<Edge> edges;
    std::vector<std::size_t> component;
    std::size_t component_count = 0;
  };

  LabelledGraph(std::shared_ptr<const Structure> structure, std::vector<RationalVector> labels,
                std::size_t label_dim);

  std::shared_ptr<const Structure> structure_;
  std::vector<RationalVector> labels_;
  std::size_t label_dim_ = 0;
};

/// Labels of the neighbours of `v`, with multiplicity.
Multiset neighbourhood(const LabelledGraph& g, std::size_t v);
Multiset neighbourhood(const LabelledGraph& g, std::string_view id);

using LabelMap = std::function<RationalVector(const RationalVector&)>;

/// Applies `h` to every label; vertices and edges are unchanged.
LabelledGraph lift(const LabelMap& h, const LabelledGraph& g);

/// Disjoint union; vertex ids of `h` get `suffix` appended when they clash.
LabelledGraph disjoint_union(const LabelledGraph& g, const LabelledGraph& h,
                             std::string_view suffix = "'");

// Graph JSON: {"vertices":[{"id":"v1","label":["1/2","3"]}],"edges":[["v1","v2"]]}
nlohmann::json graph_to_json(const LabelledGraph& g);
LabelledGraph graph_from_json(const nlohmann::json& j);
LabelledGraph load_graph(const std::filesystem::path& path);
void save_graph(const LabelledGraph& g, const std::filesystem::path& path);
/// Canonical file text: two-space indented JSON plus trailing newline.
std::string graph_text(const LabelledGraph& g);

}  // namespace rgnn
