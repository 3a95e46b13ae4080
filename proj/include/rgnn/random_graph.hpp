#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rgnn/graph.hpp"

namespace rgnn {

struct RandomGraphParams {
  std::size_t n = 6;
  /// Edge probability for each unordered pair of distinct vertices.
  Rational p{1, 2};
  /// Probability of a self-loop at each vertex.
  Rational loops{0};
  /// Labels drawn uniformly; defaults to the single label (0).
  std::vector<RationalVector> palette;
};

/// Uniform draw in [0, bound) from the generator.
std::size_t draw_below(std::mt19937_64& rng, std::size_t bound);

/// True with probability `p` (a rational in [0, 1]).
bool draw_bernoulli(std::mt19937_64& rng, const Rational& p);

/// Erdos-Renyi style graph with vertex ids v0 .. v{n-1}. The same
/// parameters and seed always give the same graph.
LabelledGraph random_graph(const RandomGraphParams& params, std::uint64_t seed);
LabelledGraph random_graph(const RandomGraphParams& params, std::mt19937_64& rng);

/// Labels from a palette of scalars, e.g. {0, 1} gives labels (0) and (1).
std::vector<RationalVector> scalar_palette(std::initializer_list<Rational> values);

/// Path v0 - v1 - ... - v{n-1}.
LabelledGraph path_graph(const std::vector<RationalVector>& labels);
/// Cycle v0 - ... - v{n-1} - v0, n >= 3.
LabelledGraph cycle_graph(const std::vector<RationalVector>& labels);

}  // namespace rgnn
