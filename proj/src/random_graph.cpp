#include "rgnn/random_graph.hpp"

#include <stdexcept>
#include <string>

namespace rgnn {

std::size_t draw_below(std::mt19937_64& rng, std::size_t bound) {
  if (bound == 0) throw std::invalid_argument("cannot draw below 0");
  return static_cast<std::size_t>(rng() % bound);
}

bool draw_bernoulli(std::mt19937_64& rng, const Rational& p) {
  if (p.sign() < 0 || p > Rational(1)) throw std::invalid_argument("probability outside [0, 1]");
  if (p.is_zero()) return false;
  if (p == Rational(1)) return true;
  const auto den = p.raw().get_den();
  const auto num = p.raw().get_num();
  if (!den.fits_ulong_p()) throw std::invalid_argument("probability denominator too large");
  return draw_below(rng, den.get_ui()) < num.get_ui();
}

namespace {

std::vector<std::string> vertex_ids(std::size_t n) {
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::size_t v = 0; v < n; ++v) ids.push_back("v" + std::to_string(v));
  return ids;
}

std::size_t dim_of(const std::vector<RationalVector>& labels) {
  return labels.empty() ? 0 : labels.front().dim();
}

}  // namespace

LabelledGraph random_graph(const RandomGraphParams& params, std::mt19937_64& rng) {
  const std::vector<RationalVector> fallback{RationalVector{0}};
  const auto& palette = params.palette.empty() ? fallback : params.palette;
  std::vector<RationalVector> labels;
  labels.reserve(params.n);
  for (std::size_t v = 0; v < params.n; ++v) labels.push_back(palette[draw_below(rng, palette.size())]);
  std::vector<LabelledGraph::Edge> edges;
  for (std::size_t u = 0; u < params.n; ++u) {
    if (draw_bernoulli(rng, params.loops)) edges.emplace_back(u, u);
    for (std::size_t v = u + 1; v < params.n; ++v) {
      if (draw_bernoulli(rng, params.p)) edges.emplace_back(u, v);
    }
  }
  return LabelledGraph(vertex_ids(params.n), std::move(labels), edges, palette.front().dim());
}

LabelledGraph random_graph(const RandomGraphParams& params, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_graph(params, rng);
}

std::vector<RationalVector> scalar_palette(std::initializer_list<Rational> values) {
  std::vector<RationalVector> out;
  for (const auto& x : values) out.push_back(RationalVector{x});
  return out;
}

LabelledGraph path_graph(const std::vector<RationalVector>& labels) {
  std::vector<LabelledGraph::Edge> edges;
  for (std::size_t v = 1; v < labels.size(); ++v) edges.emplace_back(v - 1, v);
  return LabelledGraph(vertex_ids(labels.size()), labels, edges, dim_of(labels));
}

LabelledGraph cycle_graph(const std::vector<RationalVector>& labels) {
  if (labels.size() < 3) throw std::invalid_argument("a cycle needs at least 3 vertices");
  std::vector<LabelledGraph::Edge> edges;
  for (std::size_t v = 0; v < labels.size(); ++v) edges.emplace_back(v, (v + 1) % labels.size());
  return LabelledGraph(vertex_ids(labels.size()), labels, edges, dim_of(labels));
}

}  // namespace rgnn
