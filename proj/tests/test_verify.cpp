#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rgnn/gallery.hpp"
#include "rgnn/h2c.hpp"
#include "rgnn/random_graph.hpp"
#include "rgnn/verify.hpp"

using namespace rgnn;

namespace {

const HaltingRGNN& halting_model(const char* name) {
  return std::get<HaltingRGNN>(gallery_get(name).model);
}

RunTrace derived_trace(const RGNN& derived, const LabelledGraph& g) {
  return run_converging(derived, g, RunOptions{500, true}).trace;
}

std::vector<std::size_t> phi_of(const Correspondence& c, std::size_t v) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < c.steps(); ++j) out.push_back(c.at(v, j));
  return out;
}

bool has_failure(const CoherenceReport& r, const std::string& check, std::size_t v, std::size_t j) {
  for (const auto& f : r.failures) {
    if (f.check == check && f.vertex == v && f.step == j) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("correspondence from events") {
  const auto& counter = halting_model("counter-k");
  const auto derived = to_converging(counter);

  // Hand trace on one edge: advance, wait for the neighbour's advertised
  // light to catch up, advance, wait, then halted.
  const LabelledGraph edge({"a", "b"}, {RationalVector{0}, RationalVector{0}}, {{0, 1}});
  const auto on_edge = extract_correspondence(derived_trace(derived, edge));
  CHECK(phi_of(on_edge, 0) == std::vector<std::size_t>{0, 1, 1, 2, 2, 2});
  CHECK(phi_of(on_edge, 1) == std::vector<std::size_t>{0, 1, 1, 2, 2, 2});

  // Alone, a vertex is always aligned and advances on consecutive steps.
  const LabelledGraph lone({"a"}, {RationalVector{0}}, {});
  CHECK(phi_of(extract_correspondence(derived_trace(derived, lone)), 0) ==
        std::vector<std::size_t>{0, 1, 2, 2, 2});

  // Halted at H_0: never eager.
  const auto const_phi = extract_correspondence(derived_trace(to_converging(halting_model("const-label")), lone));
  for (std::size_t j = 0; j < const_phi.steps(); ++j) CHECK(const_phi.at(0, j) == 0);

  auto no_events = derived_trace(derived, edge);
  no_events.events.clear();
  CHECK_THROWS_AS(extract_correspondence(no_events), std::invalid_argument);
}

TEST_CASE("gallery traces are coherent") {
  std::mt19937_64 rng(23);
  for (const auto& e : gallery_list()) {
    if (e.semantics != Semantics::halting) continue;
    const auto& h = std::get<HaltingRGNN>(e.model);
    const auto derived = to_converging(h);
    for (int t = 0; t < 40; ++t) {
      const auto g = testing::sample_graph(rng, 9, e.palette);
      const auto report = verify_run(h, derived, g, 500);
      CHECK_MESSAGE(report.ok(), e.name << ": " << report_to_json(report, g).dump());
      for (const char* check : {"coherence-1", "coherence-2", "coherence-3", "predicates", "decode",
                                "lemma-b", "lemma-c", "lemma-e"}) {
        CHECK(report.evaluated.count(check) == 1);
      }
    }
  }
}

TEST_CASE("Phi decoded from the lights matches the events") {
  std::mt19937_64 rng(29);
  const auto& h = halting_model("reach-red");
  const auto derived = to_converging(h);
  for (int t = 0; t < 30; ++t) {
    const auto g = testing::sample_graph(rng, 10, scalar_palette({0, 1}));
    const auto trace = derived_trace(derived, g);
    const auto phi = extract_correspondence(trace);
    for (std::size_t j = 0; j < trace.steps(); ++j) {
      for (std::size_t v = 0; v < g.size(); ++v) {
        CHECK(Configuration::from_vector(trace.states[j][v], h.dim()).tau_c == enc3(phi.at(v, j)));
      }
    }
  }
}

TEST_CASE("an overwritten advertised snapshot breaks condition 3 there") {
  const auto& h = halting_model("reach-red");
  const auto derived = to_converging(h);
  const auto g = testing::red_end_path(5);
  auto trace = derived_trace(derived, g);
  const std::size_t v = 2, j = 3;
  trace.states[j][v][ConfigLayout{h.dim()}.kappa_m()] += Rational(5);
  const auto report = verify_trace(h, derived, trace, 100);
  CHECK_FALSE(report.ok());
  CHECK(has_failure(report, "coherence-3", v, j));
}

TEST_CASE("desynchronisation on a long path") {
  const auto& h = halting_model("reach-red");
  const auto derived = to_converging(h);
  for (std::size_t n : {6, 12}) {
    const auto g = testing::red_end_path(n);
    const auto report = verify_run(h, derived, g, 500);
    CHECK(report.ok());
    CHECK(report.max_gap() == 1);
  }
}

TEST_CASE("component-local stopping indices") {
  const auto& h = halting_model("reach-red");
  const auto derived = to_converging(h);
  const LabelledGraph g({"a", "r", "x", "y"}, {RationalVector{0}, RationalVector{1}, RationalVector{0}, RationalVector{0}},
                        {{1, 2}, {2, 3}});
  const auto report = verify_run(h, derived, g, 200);
  CHECK(report.ok());
  REQUIRE(report.components.size() == 2);
  CHECK(report.components[0].k_gamma == std::optional<std::size_t>(1));
  CHECK(report.components[1].k_gamma == std::optional<std::size_t>(3));
  CHECK(report.halting_k == std::optional<std::size_t>(3));
  CHECK(report.evaluated.at("lemma-e") > 0);

  const LabelledGraph lone({"a"}, {RationalVector{0}}, {});
  const auto single = verify_run(halting_model("const-label"), to_converging(halting_model("const-label")), lone, 20);
  CHECK(single.ok());
  CHECK(single.components.at(0).j_prime == std::optional<std::size_t>(0));
}

TEST_CASE("single-field corruptions are caught") {
  std::mt19937_64 rng(31);
  for (const auto& e : gallery_list()) {
    if (e.semantics != Semantics::halting) continue;
    const auto& h = std::get<HaltingRGNN>(e.model);
    const auto derived = to_converging(h);
    for (int t = 0; t < 20; ++t) {
      const auto g = testing::sample_graph(rng, 7, e.palette);
      auto trace = derived_trace(derived, g);
      const auto what = testing::corrupt_one_field(trace, rng);
      const auto report = verify_trace(h, derived, trace, 500);
      CHECK_MESSAGE(!report.ok(), e.name << ": " << what);
    }
  }
}

TEST_CASE("malformed traces are reported, not thrown") {
  const auto& h = halting_model("reach-red");
  const auto derived = to_converging(h);
  const auto g = testing::red_end_path(3);
  auto trace = derived_trace(derived, g);
  trace.states[1].pop_back();
  const auto report = verify_trace(h, derived, trace, 100);
  CHECK(report.failed.count("trace") == 1);
}
