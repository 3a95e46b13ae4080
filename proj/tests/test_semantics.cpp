#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rgnn/bisim.hpp"
#include "rgnn/builder.hpp"
#include "rgnn/gallery.hpp"
#include "rgnn/random_graph.hpp"
#include "rgnn/semantics.hpp"
#include "rgnn/trace_io.hpp"

using namespace rgnn;

namespace {

using Rows = std::vector<RationalVector>;

RGNN identity_model() {
  return RGNN{SimpleFunction::identity(1), ACLayer::simple(SimpleFunction(Affine(2, Rows{{1, 0}}, {0}))),
              SimpleClassifier(SimpleFunction::identity(1)), std::nullopt};
}

// x -> x + 1, never converges.
RGNN strict_counter() {
  return RGNN{SimpleFunction(Affine(1, Rows{{0}}, {0})),
              ACLayer::simple(SimpleFunction(Affine(2, Rows{{1, 0}}, {1}))),
              SimpleClassifier(SimpleFunction::identity(1)), std::nullopt};
}

const RGNN& converging_model(const char* name) { return std::get<RGNN>(gallery_get(name).model); }
const HaltingRGNN& halting_model(const char* name) {
  return std::get<HaltingRGNN>(gallery_get(name).model);
}

}  // namespace

TEST_CASE("converging runs") {
  const LabelledGraph g({"a", "b"}, {RationalVector{-1}, RationalVector{2}}, {{0, 1}});
  const auto id = run_converging(identity_model(), g, 10);
  CHECK(id.k == 0);
  CHECK(id.output == std::vector<bool>{false, true});
  CHECK(id.trace.certificate == Certificate::state_fixed_point);

  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto r = testing::sample_graph(rng, 8, {RationalVector{0}});
    const auto sat = run_converging(converging_model("sat-counter"), r, 10);
    CHECK(sat.k == 3);
    CHECK(sat.trace.states.back() == std::vector<RationalVector>(r.size(), RationalVector{3}));
  }

  CHECK_THROWS_AS(run_converging(strict_counter(), g, 10), BudgetExhausted);
  try {
    run_converging(strict_counter(), g, 10);
  } catch (const BudgetExhausted& e) {
    CHECK(e.trace().steps() == 11);
  }
}

TEST_CASE("halting runs") {
  const LabelledGraph g({"a", "b", "c"}, {RationalVector{-1}, RationalVector{0}, RationalVector{2}}, {{0, 1}});
  CHECK(run_halting(halting_model("const-label"), g, 5).k == 0);

  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto r = testing::sample_graph(rng, 8, scalar_palette({-1, 0, 2}));
    CHECK(run_halting(halting_model("counter-k"), r, 10).k == 2);
  }

  // Component A = {a} holds no red vertex; B = r - x - y has one red end.
  const LabelledGraph split({"a", "r", "x", "y"},
                            {RationalVector{0}, RationalVector{1}, RationalVector{0}, RationalVector{0}},
                            {{1, 2}, {2, 3}});
  const auto run = run_halting(halting_model("reach-red"), split, 20);
  CHECK(run.k == 3);
  REQUIRE(run.trace.k_gamma.size() == 2);
  CHECK(run.trace.k_gamma[0] == std::optional<std::size_t>(1));
  CHECK(run.trace.k_gamma[1] == std::optional<std::size_t>(3));
  CHECK(run.output == std::vector<bool>{false, true, true, true});

  CHECK_THROWS_AS(run_halting(halting_model("counter-k"), g, 1), BudgetExhausted);
}

TEST_CASE("output-converging runs") {
  const LabelledGraph g({"a", "b"}, {RationalVector{0}, RationalVector{0}}, {{0, 1}});
  const auto cyc = run_output_converging(make_oscillator(true), g, 50, 4);
  CHECK(cyc.trace.certificate == Certificate::output_cycle);
  CHECK(cyc.k == 0);

  CHECK_THROWS_AS(run_output_converging(make_oscillator(false), g, 50, 4), UnstableOutputCycle);
  try {
    run_output_converging(make_oscillator(false), g, 50, 4);
  } catch (const UnstableOutputCycle& e) {
    CHECK(e.period() == 2);
    CHECK(e.cycle_start() == 0);
  }

  const auto sat = run_output_converging(converging_model("sat-counter"), g, 50, 4);
  CHECK(sat.trace.certificate == Certificate::output_cycle);
  CHECK(sat.k <= 3);
  CHECK(sat.output == run_converging(converging_model("sat-counter"), g, 50).output);

  // No repeated state within the budget; the output stays constant.
  const auto window = run_output_converging(strict_counter(), g, 8, 4);
  CHECK(window.trace.certificate == Certificate::output_window);
  CHECK_THROWS_AS(run_output_converging(strict_counter(), g, 8, 20), BudgetExhausted);
  CHECK_THROWS_AS(run_output_converging(strict_counter(), g, 8, 0), std::invalid_argument);
}

TEST_CASE("runs are deterministic and budget prefixes agree") {
  std::mt19937_64 rng(4);
  const auto& rr = halting_model("reach-red");
  for (int t = 0; t < 30; ++t) {
    const auto g = testing::sample_graph(rng, 10, scalar_palette({0, 1}));
    const auto a = run_halting(rr, g, 30);
    const auto b = run_halting(rr, g, 30);
    CHECK(a.trace.states == b.trace.states);
    CHECK(a.output == b.output);
    // A smaller budget either finishes identically or stops on a prefix.
    for (std::size_t m = 0; m <= a.k + 1; ++m) {
      try {
        const auto c = run_halting(rr, g, m);
        CHECK(c.trace.states == a.trace.states);
      } catch (const BudgetExhausted& e) {
        CHECK(e.trace().steps() == m + 1);
        CHECK(std::equal(e.trace().states.begin(), e.trace().states.end(), a.trace.states.begin()));
      }
    }
  }
}

TEST_CASE("fixed points fix the output") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 30; ++t) {
    const auto g = testing::sample_graph(rng, 8, scalar_palette({0}));
    const auto& sat = converging_model("sat-counter");
    const auto first = run_converging(sat, g, 20);
    // Iterating further from the fixed point keeps the state and the output.
    auto later = g.with_labels(first.trace.states.back());
    for (int extra = 0; extra < 3; ++extra) later = sat.layer.apply(later);
    CHECK(read_out(sat.readout, later.labels()) == first.output);
  }
}

TEST_CASE("bisimilar vertices carry equal features at every step") {
  const auto& rr = halting_model("reach-red");
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto pair = generate_bisimilar_pair(seed, 3 + seed % 5, scalar_palette({0, 1}));
    const auto a = run_halting(rr, pair.g, 40).trace;
    const auto b = run_halting(rr, pair.h, 40).trace;
    const auto steps = std::min(a.steps(), b.steps());
    for (std::size_t i = 0; i < steps; ++i) {
      for (const auto& [u, v] : pair.relation.pairs) {
        CHECK(a.states[i][pair.g.require_index(u)] == b.states[i][pair.h.require_index(v)]);
      }
    }
  }
}

TEST_CASE("trace files round-trip") {
  const auto& rr = halting_model("reach-red");
  const LabelledGraph split({"a", "r", "x"}, {RationalVector{0}, RationalVector{1}, RationalVector{0}}, {{1, 2}});
  const auto run = run_halting(rr, split, 10);
  std::stringstream text;
  write_trace(text, run.trace);
  std::stringstream in(text.str());
  const auto back = read_trace(in, split);
  CHECK(back.states == run.trace.states);
  CHECK(back.certificate == run.trace.certificate);
  CHECK(back.k == run.trace.k);
  CHECK(back.k_gamma == run.trace.k_gamma);

  std::stringstream again;
  write_trace(again, back);
  CHECK(again.str() == text.str());

  std::stringstream bad("{\"step\":0,\"features\":{\"a\":[\"x\"]}}\n");
  CHECK_THROWS_AS(read_trace(bad, split), ParseError);
}
