#include "oracles.hpp"

#include <functional>
#include <stdexcept>

#include "rgnn/random_graph.hpp"

namespace rgnn::testing {

std::size_t maximum_matching(const std::vector<std::vector<bool>>& allowed) {
  const std::size_t left = allowed.size();
  const std::size_t right = left ? allowed[0].size() : 0;
  std::vector<std::ptrdiff_t> owner(right, -1);
  std::size_t size = 0;
  for (std::size_t i = 0; i < left; ++i) {
    std::vector<bool> visited(right, false);
    std::function<bool(std::size_t)> augment = [&](std::size_t x) {
      for (std::size_t y = 0; y < right; ++y) {
        if (!allowed[x][y] || visited[y]) continue;
        visited[y] = true;
        if (owner[y] < 0 || augment(static_cast<std::size_t>(owner[y]))) {
          owner[y] = static_cast<std::ptrdiff_t>(x);
          return true;
        }
      }
      return false;
    };
    if (augment(i)) ++size;
  }
  return size;
}

PairRelation greatest_bisimulation(const LabelledGraph& g, const LabelledGraph& h) {
  PairRelation rel(g.size(), std::vector<bool>(h.size(), false));
  for (std::size_t u = 0; u < g.size(); ++u) {
    for (std::size_t v = 0; v < h.size(); ++v) rel[u][v] = g.label(u) == h.label(v);
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t u = 0; u < g.size(); ++u) {
      for (std::size_t v = 0; v < h.size(); ++v) {
        if (!rel[u][v]) continue;
        const auto nu = g.neighbours(u);
        const auto nv = h.neighbours(v);
        bool keep = nu.size() == nv.size();
        if (keep && !nu.empty()) {
          std::vector<std::vector<bool>> allowed(nu.size(), std::vector<bool>(nv.size()));
          for (std::size_t i = 0; i < nu.size(); ++i) {
            for (std::size_t j = 0; j < nv.size(); ++j) allowed[i][j] = rel[nu[i]][nv[j]];
          }
          keep = maximum_matching(allowed) == nu.size();
        }
        if (!keep) {
          rel[u][v] = false;
          changed = true;
        }
      }
    }
  }
  return rel;
}

std::size_t first_repeat_index(const RGNN& model, const LabelledGraph& g, std::size_t max_steps) {
  auto current = g.with_labels(initial_state(model, g));
  for (std::size_t i = 1; i <= max_steps; ++i) {
    auto next = model.layer.apply(current);
    if (next.labels() == current.labels()) return i;
    current = std::move(next);
  }
  throw std::runtime_error("no repeated state within the step budget");
}

LabelledGraph sample_graph(std::mt19937_64& rng, std::size_t max_n,
                           const std::vector<RationalVector>& palette) {
  static const Rational densities[] = {Rational(1, 6), Rational(1, 3), Rational(1, 2), Rational(3, 4)};
  RandomGraphParams params;
  params.n = 1 + draw_below(rng, max_n);
  params.p = densities[draw_below(rng, 4)];
  params.loops = draw_below(rng, 3) == 0 ? Rational(1, 4) : Rational(0);
  params.palette = palette;
  return random_graph(params, rng);
}

LabelledGraph red_end_path(std::size_t n) {
  std::vector<RationalVector> labels(n, RationalVector{0});
  labels.at(0) = RationalVector{1};
  return path_graph(labels);
}

std::string corrupt_one_field(RunTrace& trace, std::mt19937_64& rng) {
  const std::size_t n = trace.graph.size();
  const bool flip_event = trace.has_events() && draw_below(rng, 4) == 0;
  if (flip_event) {
    const auto j = draw_below(rng, trace.events.size());
    const auto v = draw_below(rng, n);
    auto& e = trace.events[j][v];
    switch (draw_below(rng, 4)) {
      case 0: e.advancing = !e.advancing; return "event advancing flipped";
      case 1: e.behind = !e.behind; return "event behind flipped";
      case 2: e.aligned = !e.aligned; return "event aligned flipped";
      default: e.eager = !e.eager; return "event eager flipped";
    }
  }
  const auto j = draw_below(rng, trace.states.size());
  const auto v = draw_below(rng, n);
  auto& x = trace.states[j][v];
  const auto i = draw_below(rng, x.dim());
  static const Rational shifts[] = {Rational(1), Rational(-1), Rational(1, 2), Rational(-3, 7)};
  x[i] += shifts[draw_below(rng, 4)];
  return "state component " + std::to_string(i) + " of " + trace.graph.id(v) + " at step " +
         std::to_string(j) + " shifted";
}

}  // namespace rgnn::testing
