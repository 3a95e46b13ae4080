#include "rgnn/gallery.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

#include "rgnn/builder.hpp"
#include "rgnn/model_io.hpp"

namespace rgnn {

std::string_view to_string(Semantics s) {
  switch (s) {
    case Semantics::converging: return "converging";
    case Semantics::halting: return "halting";
    case Semantics::output_converging: return "output-converging";
  }
  return "?";
}

Semantics semantics_from_string(std::string_view s) {
  for (auto v : {Semantics::converging, Semantics::halting, Semantics::output_converging}) {
    if (to_string(v) == s) return v;
  }
  throw ParseError("unknown semantics '" + std::string(s) +
                   "' (expected converging, halting or output-converging)");
}

namespace {

using Rows = std::vector<RationalVector>;

SimpleClassifier score(Affine a) { return SimpleClassifier(SimpleFunction(std::move(a))); }

SimpleFunction compiled(NetworkBuilder& b, const std::vector<LinearExpr>& outputs) {
  return b.compile(outputs);
}

std::vector<bool> per_vertex(const LabelledGraph& g, const std::function<bool(std::size_t)>& f) {
  std::vector<bool> out;
  for (std::size_t v = 0; v < g.size(); ++v) out.push_back(f(v));
  return out;
}

constexpr std::size_t unreachable = std::numeric_limits<std::size_t>::max();

// Multi-source BFS distance from the marked vertices.
std::vector<std::size_t> distance_to(const LabelledGraph& g, const std::vector<bool>& sources) {
  std::vector<std::size_t> dist(g.size(), unreachable);
  std::deque<std::size_t> queue;
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (sources[v]) {
      dist[v] = 0;
      queue.push_back(v);
    }
  }
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    for (auto u : g.neighbours(v)) {
      if (dist[u] == unreachable) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

// A flood from `sources` settles after the largest finite distance; the
// halting test sees that one step later. Components without a source halt at 1.
std::size_t flood_halting_index(const LabelledGraph& g, const std::vector<bool>& sources) {
  const auto dist = distance_to(g, sources);
  std::size_t k = 0;
  for (auto d : dist) {
    if (d != unreachable) k = std::max(k, d);
  }
  return g.size() ? k + 1 : 0;
}

GalleryEntry const_label() {
  // d = 1. In(x) = x, CMB(x, a) = x, Out(x) = [x >= 0], Hlt = 1.
  RGNN base{SimpleFunction::identity(1), ACLayer::simple(SimpleFunction(Affine(2, Rows{{1, 0}}, {0}))),
            score(Affine::identity(1)), std::nullopt};
  GalleryEntry e{"const-label", "halts at step 0; output is whether the label is non-negative", HaltingRGNN{std::move(base), score(Affine::constant(1, {1}))}, Semantics::halting};
  e.palette = {RationalVector{-1}, RationalVector{0}, RationalVector{Rational(1, 2)}};
  e.oracle = [](const LabelledGraph& g) {
    return per_vertex(g, [&](std::size_t v) { return g.label(v)[0].sign() >= 0; });
  };
  e.index_oracle = [](const LabelledGraph&) { return std::size_t{0}; };
  e.simple = true;
  e.bound = Rational(1);
  e.range_condition = true;
  return e;
}

GalleryEntry counter_k() {
  constexpr int target = 2;
  // State (l, c). In(x) = (x, 0).
  const Affine init(1, Rows{{1}, {0}}, {0, 0});
  // CMB((l, c), a) = (l, min(c + 1, K)) with min(c + 1, K) = c + 1 - ReLU(c + 1 - K).
  NetworkBuilder cmb(4);
  const auto l = cmb.input(0), c = cmb.input(1);
  const auto step = compiled(cmb, {l, c + Rational(1) - cmb.relu(c + Rational(1 - target))});
  // Hlt score 2 ReLU(c - (K - 1)) - 1: -1 below K, 1 at K.
  NetworkBuilder halt(2);
  const auto h = compiled(halt, {halt.relu(halt.input(1) - Rational(target - 1)) * Rational(2) -
                                 Rational(1)});

  RGNN base{SimpleFunction(init), ACLayer::simple(step), score(Affine(2, Rows{{1, 0}}, {0})),
            std::nullopt};
  GalleryEntry e{"counter-k", "counts to 2 and then halts; output is whether the label is non-negative", HaltingRGNN{std::move(base), SimpleClassifier(h)}, Semantics::halting};
  e.palette = {RationalVector{-1}, RationalVector{0}, RationalVector{2}};
  e.oracle = [](const LabelledGraph& g) {
    return per_vertex(g, [&](std::size_t v) { return g.label(v)[0].sign() >= 0; });
  };
  e.index_oracle = [](const LabelledGraph& g) { return g.size() ? std::size_t{target} : 0; };
  e.simple = true;
  e.bound = Rational(1);
  e.range_condition = true;
  return e;
}

std::vector<bool> red_vertices(const LabelledGraph& g) {
  return per_vertex(g, [&](std::size_t v) { return g.label(v)[0] == Rational(1); });
}

GalleryEntry reach_red() {
  // State (b, p): reached bit and its previous value. In(x) = (x, x - 1).
  const Affine init(1, Rows{{1}, {1}}, {0, -1});
  // b' = min(b + sum of neighbour b, 1), p' = b.
  NetworkBuilder cmb(4);
  const auto b = cmb.input(0), a_b = cmb.input(2);
  const auto step = compiled(cmb, {cmb.min_one(b + a_b), b});
  // Hlt score 1 - 2 (b - p): -1 while b just changed, 1 once it held.
  const Affine halt(2, Rows{{-2, 2}}, {1});
  // Out: b - 1/2 >= 0.
  const Affine out(2, Rows{{1, 0}}, {Rational(-1, 2)});

  RGNN base{SimpleFunction(init), ACLayer::simple(step), score(out), std::nullopt};
  GalleryEntry e{"reach-red", "true at vertices connected to a red vertex (label 1); halts once no bit changes", HaltingRGNN{std::move(base), score(halt)}, Semantics::halting};
  e.palette = {RationalVector{0}, RationalVector{1}};
  e.oracle = [](const LabelledGraph& g) {
    const auto dist = distance_to(g, red_vertices(g));
    return per_vertex(g, [&](std::size_t v) { return dist[v] != unreachable; });
  };
  e.index_oracle = [](const LabelledGraph& g) { return flood_halting_index(g, red_vertices(g)); };
  e.simple = true;
  e.bound = Rational(1);
  e.range_condition = true;
  return e;
}

std::pair<std::size_t, std::size_t> coloured_neighbours(const LabelledGraph& g, std::size_t v) {
  std::size_t green = 0, red = 0;
  for (auto u : g.neighbours(v)) {
    green += g.label(u)[0] == Rational(1) ? 1 : 0;
    red += g.label(u)[1] == Rational(1) ? 1 : 0;
  }
  return {green, red};
}

GalleryEntry green_eq_red() {
  // Label (g, r); state (g, r, green count, red count). In(g, r) = (g, r, 0, 0).
  const Affine init(2, Rows{{1, 0}, {0, 1}, {0, 0}, {0, 0}}, {0, 0, 0, 0});
  // CMB(x, a) = (x1, x2, a1, a2).
  const Affine step(8, Rows{{1, 0, 0, 0, 0, 0, 0, 0},
                            {0, 1, 0, 0, 0, 0, 0, 0},
                            {0, 0, 0, 0, 1, 0, 0, 0},
                            {0, 0, 0, 0, 0, 1, 0, 0}},
                    {0, 0, 0, 0});
  // Out: -|y3 - y4| >= 0.
  NetworkBuilder out(4);
  const auto readout = compiled(out, {-out.abs(out.input(2) - out.input(3))});

  GalleryEntry e{"green-eq-red", "true where a vertex has equally many green (1, 0) and red (0, 1) neighbours", RGNN{SimpleFunction(init), ACLayer::simple(SimpleFunction(step)),
                 SimpleClassifier(readout), std::nullopt}, Semantics::converging};
  e.palette = {RationalVector{0, 0}, RationalVector{1, 0}, RationalVector{0, 1}};
  e.oracle = [](const LabelledGraph& g) {
    return per_vertex(g, [&](std::size_t v) {
      const auto [green, red] = coloured_neighbours(g, v);
      return green == red;
    });
  };
  e.index_oracle = [](const LabelledGraph& g) {
    for (std::size_t v = 0; v < g.size(); ++v) {
      const auto [green, red] = coloured_neighbours(g, v);
      if (green || red) return std::size_t{1};
    }
    return std::size_t{0};
  };
  e.simple = true;
  return e;
}

GalleryEntry sat_counter() {
  // In(x) = 0, CMB(x, a) = min(x + 1, 3) = x + 1 - ReLU(x - 2), Out: x - 3 >= 0.
  NetworkBuilder cmb(2);
  const auto x = cmb.input(0);
  const auto step = compiled(cmb, {x + Rational(1) - cmb.relu(x - Rational(2))});
  GalleryEntry e{"sat-counter", "counts to 3 and stays there; output is always true", RGNN{SimpleFunction(Affine(1, Rows{{0}}, {0})), ACLayer::simple(step),
                 score(Affine(1, Rows{{1}}, {-3})), std::nullopt}, Semantics::converging};
  e.palette = {RationalVector{0}};
  e.oracle = [](const LabelledGraph& g) { return std::vector<bool>(g.size(), true); };
  e.index_oracle = [](const LabelledGraph& g) { return g.size() ? std::size_t{3} : 0; };
  e.simple = true;
  return e;
}

GalleryEntry osc_const_out() {
  GalleryEntry e{"osc-const-out", "state flips sign every step; readout is constantly true", make_oscillator(true), Semantics::output_converging};
  e.palette = {RationalVector{0}};
  e.oracle = [](const LabelledGraph& g) { return std::vector<bool>(g.size(), true); };
  e.index_oracle = [](const LabelledGraph&) { return std::size_t{0}; };
  e.simple = true;
  return e;
}

std::vector<bool> component_max_vertices(const LabelledGraph& g) {
  std::vector<Rational> best(g.component_count());
  std::vector<bool> seen(g.component_count(), false);
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto c = g.component_of()[v];
    if (!seen[c] || g.label(v)[0] > best[c]) best[c] = g.label(v)[0];
    seen[c] = true;
  }
  return per_vertex(g, [&](std::size_t v) { return g.label(v)[0] == best[g.component_of()[v]]; });
}

GalleryEntry max_flood() {
  // State (m, p): running maximum and its previous value. In(x) = (x, x - 1);
  // AGG = componentwise max; CMB((m, p), a) = (max(m, a_m), m); halts when m = p.
  RGNN base{SimpleFunction(Affine(1, Rows{{1}, {1}}, {0, -1})),
            ACLayer::general(2, 2, {"max", ExternalRegistry::builtin().aggregator("max")},
                             {"max-flood", ExternalRegistry::builtin().combiner("max-flood")}),
            score(Affine(2, Rows{{1, 0}}, {-1})), std::nullopt};
  Classifier halt = Classifier::External{"max-flood-halt", 2,
                                         ExternalRegistry::builtin().score("max-flood-halt")};
  GalleryEntry e{"max-flood", "floods the largest label through each component; true where it is at least 1", HaltingRGNN{std::move(base), std::move(halt)}, Semantics::halting};
  e.palette = {RationalVector{0}, RationalVector{1}, RationalVector{2}, RationalVector{3}};
  e.oracle = [](const LabelledGraph& g) {
    const auto top = component_max_vertices(g);
    std::vector<Rational> best(g.component_count());
    for (std::size_t v = 0; v < g.size(); ++v) {
      if (top[v]) best[g.component_of()[v]] = g.label(v)[0];
    }
    return per_vertex(g, [&](std::size_t v) { return best[g.component_of()[v]] >= Rational(1); });
  };
  e.index_oracle = [](const LabelledGraph& g) {
    return flood_halting_index(g, component_max_vertices(g));
  };
  return e;
}

}  // namespace

RGNN make_oscillator(bool constant_readout) {
  // In = 1, CMB(x, a) = -x; Out is 0 >= 0 or x >= 0.
  return RGNN{SimpleFunction(Affine::constant(1, {1})),
              ACLayer::simple(SimpleFunction(Affine(2, Rows{{-1, 0}}, {0}))),
              constant_readout ? score(Affine::constant(1, {0})) : score(Affine::identity(1)),
              std::nullopt};
}

void register_gallery_externals(ExternalRegistry& registry) {
  registry.add_aggregator("max", [](const Multiset& m) {
    RationalVector out;
    for (const auto& [x, count] : m.entries()) {
      if (out.empty()) {
        out = x;
        continue;
      }
      for (std::size_t i = 0; i < x.dim(); ++i) out[i] = std::max(out[i], x[i]);
    }
    return out.empty() ? RationalVector::zeros(2) : out;
  });
  registry.add_combiner("max-flood", [](const RationalVector& self, const RationalVector& agg) {
    return RationalVector{std::max(self[0], agg[0]), self[0]};
  });
  registry.add_score("max-flood-halt", [](const RationalVector& x) {
    return x[0] == x[1] ? Rational(0) : Rational(-1);
  });
}

const std::vector<GalleryEntry>& gallery_list() {
  static const std::vector<GalleryEntry> entries{const_label(), counter_k(),  reach_red(),
                                                 green_eq_red(), sat_counter(), osc_const_out(),
                                                 max_flood()};
  return entries;
}

const GalleryEntry& gallery_get(std::string_view name) {
  for (const auto& e : gallery_list()) {
    if (e.name == name) return e;
  }
  std::string known;
  for (const auto& e : gallery_list()) known += (known.empty() ? "" : ", ") + e.name;
  throw std::invalid_argument("unknown gallery model '" + std::string(name) + "' (known: " + known + ")");
}

}  // namespace rgnn
