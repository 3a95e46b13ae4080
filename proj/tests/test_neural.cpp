#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rgnn/bisim.hpp"
#include "rgnn/builder.hpp"
#include "rgnn/layer.hpp"
#include "rgnn/model_io.hpp"
#include "rgnn/network.hpp"
#include "rgnn/random_graph.hpp"

using namespace rgnn;

namespace {

using Rows = std::vector<RationalVector>;

Rational random_rational(std::mt19937_64& rng) {
  return Rational(static_cast<long>(rng() % 41) - 20, 1 + static_cast<long>(rng() % 6));
}

SimpleFunction random_network(std::mt19937_64& rng, std::size_t in, std::size_t out) {
  std::vector<Affine> layers;
  std::size_t width = in;
  const std::size_t depth = 1 + rng() % 3;
  for (std::size_t l = 0; l < depth; ++l) {
    const std::size_t next = l + 1 == depth ? out : 1 + rng() % 4;
    Rows rows;
    RationalVector bias(next);
    for (std::size_t r = 0; r < next; ++r) {
      RationalVector row(width);
      for (auto& c : row) c = random_rational(rng);
      rows.push_back(row);
      bias[r] = random_rational(rng);
    }
    layers.emplace_back(width, rows, bias);
    width = next;
  }
  return SimpleFunction(layers);
}

}  // namespace

TEST_CASE("forward evaluation") {
  CHECK(eval_simple(SimpleFunction::identity(2), RationalVector{-2, 3}) == RationalVector{-2, 3});
  CHECK(eval_simple(gadgets::abs(), RationalVector{-3}) == RationalVector{3});
  CHECK(eval_simple(gadgets::min_one(), RationalVector{4}) == RationalVector{1});
  CHECK(eval_simple(gadgets::min_one(), RationalVector{0}) == RationalVector{0});
  CHECK(eval_simple(gadgets::min_one(), RationalVector{Rational(1, 3)}) == RationalVector{Rational(1, 3)});
  CHECK_THROWS_AS(eval_simple(SimpleFunction::identity(2), RationalVector{1}), std::invalid_argument);
}

TEST_CASE("classifiers read the sign of the score") {
  const SimpleClassifier id(SimpleFunction::identity(1));
  CHECK(classify(id, RationalVector{0}));
  CHECK_FALSE(classify(id, RationalVector{Rational(-1, 7)}));
  const SimpleClassifier shifted(SimpleFunction(Affine(1, Rows{{1}}, {Rational(-1, 2)})));
  CHECK(classify(shifted, RationalVector{1}));
  CHECK_THROWS_AS(SimpleClassifier(SimpleFunction::identity(2)), std::invalid_argument);
}

TEST_CASE("evaluation is deterministic") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 100; ++t) {
    const auto f = random_network(rng, 3, 2);
    RationalVector x(3);
    for (auto& c : x) c = random_rational(rng);
    CHECK(eval_simple(f, x) == eval_simple(f, x));
  }
}

TEST_CASE("network JSON round trip") {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 50; ++t) {
    const auto f = random_network(rng, 2, 3);
    const auto j = network_to_json(f);
    CHECK(is_network_json(j));
    CHECK(network_from_json(j) == f);
  }
  CHECK_THROWS_AS(network_from_json(nlohmann::json::parse(R"({"layers":["relu"]})")), ParseError);
  CHECK_THROWS_AS(network_from_json(nlohmann::json::parse(
                      R"({"layers":[{"affine":{"matrix":[["1"]],"bias":["0"]}},{"affine":{"matrix":[["1"]],"bias":["0"]}}]})")),
                  ParseError);
}

TEST_CASE("builder circuits agree with direct evaluation") {
  std::mt19937_64 rng(12);
  NetworkBuilder b(3);
  const auto x = b.input(0), y = b.input(1), z = b.input(2);
  const auto m = b.min(x, y);
  const auto deep = b.relu(b.abs(m - z) - b.min_one(z));
  const auto f = b.compile(std::vector<LinearExpr>{m, deep, x * Rational(2) + Rational(1)});
  for (int t = 0; t < 200; ++t) {
    const Rational a = random_rational(rng), c = random_rational(rng), e = random_rational(rng);
    const Rational mm = std::min(a, c);
    const Rational expected_deep = relu(abs(mm - e) - std::min(e, Rational(1)));
    CHECK(f(RationalVector{a, c, e}) == RationalVector{mm, expected_deep, a * Rational(2) + Rational(1)});
  }
}

TEST_CASE("sum-aggregation layers") {
  // CMB(x, a) = a.
  const auto take_aggregate = ACLayer::simple(SimpleFunction(Affine(2, Rows{{0, 1}}, {0})));
  const LabelledGraph path({"u", "v", "w"}, {RationalVector{1}, RationalVector{2}, RationalVector{3}},
                           {{0, 1}, {1, 2}});
  const auto out = apply_ac_layer(take_aggregate, path);
  CHECK(out.labels() == std::vector<RationalVector>{RationalVector{2}, RationalVector{4}, RationalVector{2}});
  CHECK(out.edges() == path.edges());

  const auto keep_self = ACLayer::simple(SimpleFunction(Affine(2, Rows{{1, 0}}, {0})));
  CHECK(apply_ac_layer(keep_self, path) == path);

  const LabelledGraph lone({"x"}, {RationalVector{7, 1}}, {});
  const auto pair_layer = ACLayer::simple(SimpleFunction::identity(4));
  CHECK_THROWS_AS(ACLayer::simple(SimpleFunction::identity(3)), std::invalid_argument);
  CHECK(pair_layer.aggregate_at(lone, 0) == RationalVector{0, 0});
  CHECK_THROWS_AS(apply_ac_layer(take_aggregate, lone), std::invalid_argument);
}

TEST_CASE("structural simplicity validator") {
  const auto layer = ACLayer::simple(SimpleFunction(Affine(2, Rows{{1, 1}}, {0})));
  RGNN simple{SimpleFunction::identity(1), layer, SimpleClassifier(SimpleFunction::identity(1)), std::nullopt};
  CHECK(check_simple(Model{simple}).simple);
  const auto j = model_to_json(Model{simple});
  CHECK(check_simple(j).simple);

  auto broken = j;
  broken["layer"]["aggregation"] = "external:max";
  CHECK_FALSE(check_simple(broken).simple);
  auto weird = j;
  weird["readout"]["layers"].push_back("sigmoid");
  CHECK_FALSE(check_simple(weird).simple);

  const auto general = ACLayer::general(
      1, 1, {"max", ExternalRegistry::builtin().aggregator("max")},
      {"sum2", [](const RationalVector& x, const RationalVector& a) { return x + a; }});
  RGNN not_simple{SimpleFunction::identity(1), general, SimpleClassifier(SimpleFunction::identity(1)), std::nullopt};
  CHECK_FALSE(not_simple.is_simple());
  CHECK_FALSE(check_simple(Model{not_simple}).simple);
}

TEST_CASE("layers preserve graded bisimulations") {
  std::mt19937_64 rng(21);
  const auto palette = scalar_palette({0, 1, 2});
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto pair = generate_bisimilar_pair(seed, 3 + seed % 4, palette);
    REQUIRE(check_graded_bisimulation(pair.g, pair.h, pair.relation).ok);
    const auto layer = ACLayer::simple(random_network(rng, 2, 1));
    const auto lg = apply_ac_layer(layer, pair.g);
    const auto lh = apply_ac_layer(layer, pair.h);
    CHECK(check_graded_bisimulation(lg, lh, pair.relation).ok);
  }
}
