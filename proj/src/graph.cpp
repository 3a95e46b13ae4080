#include "rgnn/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rgnn {

void Multiset::add(const RationalVector& x, std::size_t count) {
  if (count == 0) return;
  entries_[x] += count;
  size_ += count;
}

std::size_t Multiset::multiplicity(const RationalVector& x) const {
  auto it = entries_.find(x);
  return it == entries_.end() ? 0 : it->second;
}

RationalVector sum(const Multiset& m, std::size_t dim) {
  RationalVector total(dim);
  for (const auto& [x, count] : m.entries()) {
    if (x.dim() != dim) throw std::invalid_argument("multiset element has wrong dimension");
    for (std::size_t i = 0; i < dim; ++i) total[i] += x[i] * Rational(static_cast<long>(count));
  }
  return total;
}

LabelledGraph::LabelledGraph(std::vector<std::string> ids, std::vector<RationalVector> labels,
                             const std::vector<Edge>& edges, std::size_t label_dim) {
  if (ids.size() != labels.size()) {
    throw std::invalid_argument("vertex id and label counts differ");
  }
  auto s = std::make_shared<Structure>();
  s->ids = std::move(ids);
  const std::size_t n = s->ids.size();
  for (std::size_t v = 0; v < n; ++v) {
    if (!s->index.emplace(s->ids[v], v).second) {
      throw std::invalid_argument("duplicate vertex id '" + s->ids[v] + "'");
    }
  }
  label_dim_ = labels.empty() ? label_dim : labels.front().dim();
  for (const auto& l : labels) {
    if (l.dim() != label_dim_) throw std::invalid_argument("labels of differing dimension");
  }

  std::set<Edge> canonical;
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw std::out_of_range("edge endpoint out of range");
    canonical.emplace(std::min(u, v), std::max(u, v));
  }
  s->edges.assign(canonical.begin(), canonical.end());
  s->adjacency.resize(n);
  for (auto [u, v] : s->edges) {
    s->adjacency[u].push_back(v);
    if (u != v) s->adjacency[v].push_back(u);
  }
  for (auto& adj : s->adjacency) std::sort(adj.begin(), adj.end());

  s->component.assign(n, n);
  for (std::size_t root = 0; root < n; ++root) {
    if (s->component[root] != n) continue;
    const std::size_t c = s->component_count++;
    std::vector<std::size_t> stack{root};
    s->component[root] = c;
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (auto u : s->adjacency[v]) {
        if (s->component[u] == n) {
          s->component[u] = c;
          stack.push_back(u);
        }
      }
    }
  }

  structure_ = std::move(s);
  labels_ = std::move(labels);
}

LabelledGraph::LabelledGraph(std::shared_ptr<const Structure> structure,
                             std::vector<RationalVector> labels, std::size_t label_dim)
    : structure_(std::move(structure)), labels_(std::move(labels)), label_dim_(label_dim) {}

std::optional<std::size_t> LabelledGraph::index_of(std::string_view id) const {
  auto it = structure_->index.find(std::string(id));
  if (it == structure_->index.end()) return std::nullopt;
  return it->second;
}

std::size_t LabelledGraph::require_index(std::string_view id) const {
  if (auto v = index_of(id)) return *v;
  throw std::out_of_range("unknown vertex id '" + std::string(id) + "'");
}

bool LabelledGraph::adjacent(std::size_t u, std::size_t v) const {
  const auto& adj = structure_->adjacency[u];
  return std::binary_search(adj.begin(), adj.end(), v);
}

std::vector<std::vector<std::size_t>> LabelledGraph::components() const {
  std::vector<std::vector<std::size_t>> out(component_count());
  for (std::size_t v = 0; v < size(); ++v) out[structure_->component[v]].push_back(v);
  return out;
}

LabelledGraph LabelledGraph::with_labels(std::vector<RationalVector> labels) const {
  if (labels.size() != size()) throw std::invalid_argument("label count does not match graph");
  std::size_t dim = labels.empty() ? 0 : labels.front().dim();
  for (const auto& l : labels) {
    if (l.dim() != dim) throw std::invalid_argument("labels of differing dimension");
  }
  return LabelledGraph(structure_, std::move(labels), dim);
}

bool LabelledGraph::same_structure(const LabelledGraph& other) const {
  return structure_ == other.structure_ ||
         (structure_->ids == other.structure_->ids && structure_->edges == other.structure_->edges);
}

bool operator==(const LabelledGraph& lhs, const LabelledGraph& rhs) {
  return lhs.label_dim_ == rhs.label_dim_ && lhs.labels_ == rhs.labels_ && lhs.same_structure(rhs);
}

Multiset neighbourhood(const LabelledGraph& g, std::size_t v) {
  if (v >= g.size()) throw std::out_of_range("vertex index out of range");
  Multiset m;
  for (auto u : g.neighbours(v)) m.add(g.label(u));
  return m;
}

Multiset neighbourhood(const LabelledGraph& g, std::string_view id) {
  return neighbourhood(g, g.require_index(id));
}

LabelledGraph lift(const LabelMap& h, const LabelledGraph& g) {
  std::vector<RationalVector> labels;
  labels.reserve(g.size());
  for (const auto& l : g.labels()) labels.push_back(h(l));
  return g.with_labels(std::move(labels));
}

LabelledGraph disjoint_union(const LabelledGraph& g, const LabelledGraph& h,
                             std::string_view suffix) {
  if (g.size() && h.size() && g.label_dim() != h.label_dim()) {
    throw std::invalid_argument("disjoint union of graphs with different label dimensions");
  }
  std::vector<std::string> ids = g.ids();
  std::set<std::string> taken(ids.begin(), ids.end());
  for (const auto& id : h.ids()) {
    std::string fresh = id;
    while (taken.count(fresh)) fresh += suffix;
    taken.insert(fresh);
    ids.push_back(fresh);
  }
  std::vector<RationalVector> labels = g.labels();
  labels.insert(labels.end(), h.labels().begin(), h.labels().end());
  std::vector<LabelledGraph::Edge> edges = g.edges();
  for (auto [u, v] : h.edges()) edges.emplace_back(u + g.size(), v + g.size());
  return LabelledGraph(std::move(ids), std::move(labels), edges,
                       g.size() ? g.label_dim() : h.label_dim());
}

nlohmann::json graph_to_json(const LabelledGraph& g) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (std::size_t v = 0; v < g.size(); ++v) {
    j["vertices"].push_back({{"id", g.id(v)}, {"label", to_json(g.label(v))}});
  }
  j["edges"] = nlohmann::json::array();
  for (auto [u, v] : g.edges()) j["edges"].push_back({g.id(u), g.id(v)});
  if (g.size() == 0) j["labelDim"] = g.label_dim();
  return j;
}

LabelledGraph graph_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("vertices") || !j["vertices"].is_array()) {
    throw ParseError("graph JSON needs a 'vertices' array");
  }
  std::vector<std::string> ids;
  std::vector<RationalVector> labels;
  for (const auto& vj : j["vertices"]) {
    if (!vj.contains("id") || !vj["id"].is_string() || !vj.contains("label")) {
      throw ParseError("vertex entries need string 'id' and 'label'");
    }
    ids.push_back(vj["id"].get<std::string>());
    labels.push_back(vector_from_json(vj["label"]));
  }
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t v = 0; v < ids.size(); ++v) {
    if (!index.emplace(ids[v], v).second) throw ParseError("duplicate vertex id '" + ids[v] + "'");
  }
  const auto lookup = [&](const nlohmann::json& idj) {
    if (!idj.is_string()) throw ParseError("edge endpoints must be vertex id strings");
    auto it = index.find(idj.get<std::string>());
    if (it == index.end()) throw ParseError("edge references unknown vertex " + idj.dump());
    return it->second;
  };

  std::vector<LabelledGraph::Edge> edges;
  std::set<LabelledGraph::Edge> arcs;
  if (j.contains("edges")) {
    if (!j["edges"].is_array()) throw ParseError("'edges' must be an array");
    for (const auto& ej : j["edges"]) {
      if (!ej.is_array() || ej.size() != 2) throw ParseError("edges are [id, id] pairs");
      const auto u = lookup(ej[0]);
      const auto v = lookup(ej[1]);
      edges.emplace_back(u, v);
      arcs.emplace(u, v);
    }
  }
  // Edge pairs are unordered by default. A file that declares itself directed
  // must already list every arc in both orientations.
  if (j.value("directed", false)) {
    for (auto [u, v] : arcs) {
      if (!arcs.count({v, u})) {
        throw ParseError("directed graph is not symmetric: missing arc " + ids[v] + " -> " +
                         ids[u]);
      }
    }
  }
  std::size_t dim = 0;
  if (labels.empty() && j.contains("labelDim")) dim = j["labelDim"].get<std::size_t>();
  try {
    return LabelledGraph(std::move(ids), std::move(labels), edges, dim);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

std::string graph_text(const LabelledGraph& g) { return graph_to_json(g).dump(2) + "\n"; }

LabelledGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open graph file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("graph file " + path.string() + ": " + e.what());
  }
  return graph_from_json(j);
}

void save_graph(const LabelledGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << graph_text(g);
}

}  // namespace rgnn
