#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "rgnn/bisim.hpp"
#include "rgnn/cli.hpp"
#include "rgnn/gallery.hpp"
#include "rgnn/h2c.hpp"
#include "rgnn/model_io.hpp"
#include "rgnn/random_graph.hpp"
#include "rgnn/trace_io.hpp"

using namespace rgnn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

// Scratch directory with the gallery fixtures and a few graphs.
class Lab {
 public:
  explicit Lab(const std::string& name) : dir_(fs::temp_directory_path() / ("rgnn_cli_" + name)) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    for (const auto& e : gallery_list()) save_model(e.model, path(e.name + ".json"));
  }
  ~Lab() { fs::remove_all(dir_); }

  std::string path(const std::string& file) const { return (dir_ / file).string(); }

  Outcome run(std::vector<std::string> args) const {
    args.insert(args.begin(), "rgnn_lab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
  }

  std::string read(const std::string& file) const {
    std::ifstream in(path(file));
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  void write(const std::string& file, const std::string& text) const {
    std::ofstream(path(file)) << text;
  }

 private:
  fs::path dir_;
};

nlohmann::json last_line(const std::string& text) {
  const auto end = text.find_last_not_of('\n');
  const auto start = text.rfind('\n', end);
  return nlohmann::json::parse(text.substr(start == std::string::npos ? 0 : start + 1));
}

}  // namespace

TEST_CASE("run") {
  Lab lab("run");
  save_graph(LabelledGraph({"a", "b"}, {RationalVector{-1}, RationalVector{2}}, {{0, 1}}), lab.path("g.json"));

  const auto halt = lab.run({"run", "--model", lab.path("const-label.json"), "--graph", lab.path("g.json"),
                             "--semantics", "halting", "--trace", lab.path("t.jsonl")});
  CHECK(halt.code == exit_ok);
  const auto summary = last_line(halt.out);
  CHECK(summary["k"] == 0);
  CHECK(summary["certificate"] == "all-halted");
  CHECK(summary["output"]["a"] == false);
  CHECK(summary["output"]["b"] == true);
  CHECK(last_line(lab.read("t.jsonl"))["certificate"] == "all-halted");

  // x -> x + 1 never reaches a fixed point.
  const RGNN counter{SimpleFunction(Affine(1, {RationalVector{0}}, {0})),
                     ACLayer::simple(SimpleFunction(Affine(2, {RationalVector{1, 0}}, {1}))),
                     SimpleClassifier(SimpleFunction::identity(1)), std::nullopt};
  save_model(Model{counter}, lab.path("strict.json"));
  const auto diverge = lab.run({"run", "--model", lab.path("strict.json"), "--graph", lab.path("g.json"),
                                "--semantics", "converging", "--max-steps", "10"});
  CHECK(diverge.code == exit_budget);

  const auto osc = lab.run({"run", "--model", lab.path("osc-const-out.json"), "--graph", lab.path("g.json"),
                            "--semantics", "output-converging", "--window", "4"});
  CHECK(osc.code == exit_ok);
  CHECK(last_line(osc.out)["certificate"] == "output-cycle");

  save_model(Model{make_oscillator(false)}, lab.path("osc-sign.json"));
  const auto unstable = lab.run({"run", "--model", lab.path("osc-sign.json"), "--graph", lab.path("g.json"),
                                 "--semantics", "output-converging"});
  CHECK(unstable.code == exit_unstable_output);
}

TEST_CASE("run errors") {
  Lab lab("run_errors");
  save_graph(LabelledGraph({"a"}, {RationalVector{0}}, {}), lab.path("g.json"));
  lab.write("bad.json", "{ not json");
  CHECK(lab.run({"run", "--model", lab.path("bad.json"), "--graph", lab.path("g.json"), "--semantics",
                 "halting"}).code == exit_usage);
  CHECK(lab.run({"run", "--model", lab.path("reach-red.json"), "--graph", lab.path("missing.json"),
                 "--semantics", "halting"}).code == exit_usage);
  CHECK(lab.run({"run", "--model", lab.path("reach-red.json"), "--graph", lab.path("g.json"),
                 "--semantics", "sometimes"}).code == exit_usage);
  CHECK(lab.run({"run", "--model", lab.path("reach-red.json"), "--graph", lab.path("g.json"),
                 "--semantics", "converging"}).code == exit_usage);
  CHECK(lab.run({"run", "--model", lab.path("reach-red.json")}).code == exit_usage);
  CHECK(lab.run({}).code == exit_usage);
  CHECK(lab.run({"frobnicate"}).code == exit_usage);
}

TEST_CASE("default step budget from the environment") {
  Lab lab("env");
  save_graph(LabelledGraph({"a"}, {RationalVector{0}}, {}), lab.path("g.json"));
  const std::vector<std::string> args{"run", "--model", lab.path("counter-k.json"), "--graph",
                                      lab.path("g.json"), "--semantics", "halting"};
  ::setenv("RGNN_LAB_MAX_STEPS_DEFAULT", "1", 1);
  CHECK(lab.run(args).code == exit_budget);
  ::setenv("RGNN_LAB_MAX_STEPS_DEFAULT", "lots", 1);
  CHECK(lab.run(args).code == exit_usage);
  ::unsetenv("RGNN_LAB_MAX_STEPS_DEFAULT");
  CHECK(lab.run(args).code == exit_ok);
}

TEST_CASE("transform") {
  Lab lab("transform");
  const auto c2h = lab.run({"transform", "--direction", "c2h", "--simple", "--model",
                            lab.path("green-eq-red.json"), "--out", lab.path("geq_h.json")});
  CHECK(c2h.code == exit_ok);
  const auto geq = load_model(lab.path("geq_h.json"));
  CHECK(std::holds_alternative<HaltingRGNN>(geq));
  CHECK(check_simple(geq).simple);
  CHECK(nlohmann::json::parse(lab.read("geq_h.json"))["provenance"]["construction"] == "c2h");

  const auto h2c = lab.run({"transform", "--direction", "h2c", "--simple", "--bound", "1", "--model",
                            lab.path("reach-red.json"), "--out", lab.path("rr_c.json")});
  CHECK(h2c.code == exit_ok);
  CHECK(check_simple(load_model(lab.path("rr_c.json"))).simple);

  const auto general = lab.run({"transform", "--direction", "h2c", "--model", lab.path("max-flood.json")});
  CHECK(general.code == exit_ok);
  const auto derived = model_from_json(nlohmann::json::parse(general.out));
  CHECK(std::holds_alternative<RGNN>(derived));

  CHECK(lab.run({"transform", "--direction", "h2c", "--simple", "--bound", "1", "--model",
                 lab.path("max-flood.json")}).code == exit_usage);
  CHECK(lab.run({"transform", "--direction", "h2c", "--simple", "--model", lab.path("reach-red.json")}).code ==
        exit_usage);
  CHECK(lab.run({"transform", "--direction", "sideways", "--model", lab.path("reach-red.json")}).code ==
        exit_usage);
  CHECK(lab.run({"transform", "--direction", "c2h", "--model", lab.path("reach-red.json")}).code == exit_usage);

  // Same input, same bytes.
  const auto again = lab.run({"transform", "--direction", "h2c", "--model", lab.path("max-flood.json")});
  CHECK(again.out == general.out);
}

TEST_CASE("verify") {
  Lab lab("verify");
  CHECK(lab.run({"gen", "--random-graph", "n=8", "p=1/2", "seed=4", "palette=0,1", "--out",
                 lab.path("g.json")}).code == exit_ok);
  const auto ok = lab.run({"verify", "--model", lab.path("reach-red.json"), "--graph", lab.path("g.json")});
  CHECK(ok.code == exit_ok);
  CHECK(nlohmann::json::parse(ok.out)["ok"] == true);

  // Two components halting at different steps.
  save_graph(LabelledGraph({"a", "r", "x", "y"}, {RationalVector{0}, RationalVector{1}, RationalVector{0}, RationalVector{0}},
                           {{1, 2}, {2, 3}}),
             lab.path("split.json"));
  const auto split = lab.run({"verify", "--model", lab.path("reach-red.json"), "--graph", lab.path("split.json")});
  CHECK(split.code == exit_ok);
  const auto report = nlohmann::json::parse(split.out);
  REQUIRE(report["components"].size() == 2);
  CHECK(report["components"][0]["kGamma"] == 1);
  CHECK(report["components"][1]["kGamma"] == 3);

  // A recorded trace with one advertised snapshot overwritten.
  CHECK(lab.run({"transform", "--direction", "h2c", "--model", lab.path("reach-red.json"), "--out",
                 lab.path("rr_c.json")}).code == exit_ok);
  CHECK(lab.run({"run", "--model", lab.path("rr_c.json"), "--graph", lab.path("split.json"), "--semantics",
                 "converging", "--events", "--trace", lab.path("t.jsonl")}).code == exit_ok);
  const auto g = load_graph(lab.path("split.json"));
  auto trace = load_trace(lab.path("t.jsonl"), g);
  CHECK(trace.has_events());
  trace.states[2][2][ConfigLayout{2}.kappa_m()] += Rational(1);
  save_trace(trace, lab.path("bad.jsonl"));
  const auto bad = lab.run({"verify", "--model", lab.path("reach-red.json"), "--derived", lab.path("rr_c.json"),
                            "--graph", lab.path("split.json"), "--trace", lab.path("bad.jsonl")});
  CHECK(bad.code == exit_check_failed);
  const auto bad_report = nlohmann::json::parse(bad.out);
  bool witnessed = false;
  for (const auto& f : bad_report["failures"]) {
    witnessed = witnessed || (f["check"] == "coherence-3" && f["vertex"] == "x" && f["step"] == 2);
  }
  CHECK(witnessed);

  // The untouched trace passes, with or without recorded events.
  CHECK(lab.run({"verify", "--model", lab.path("reach-red.json"), "--derived", lab.path("rr_c.json"), "--graph",
                 lab.path("split.json"), "--trace", lab.path("t.jsonl")}).code == exit_ok);
  CHECK(lab.run({"run", "--model", lab.path("rr_c.json"), "--graph", lab.path("split.json"), "--semantics",
                 "converging", "--trace", lab.path("plain.jsonl")}).code == exit_ok);
  CHECK(lab.run({"verify", "--model", lab.path("reach-red.json"), "--derived", lab.path("rr_c.json"), "--graph",
                 lab.path("split.json"), "--trace", lab.path("plain.jsonl")}).code == exit_ok);
}

TEST_CASE("verify trials are independent of the worker count") {
  Lab lab("trials");
  const std::vector<std::string> base{"verify", "--model", lab.path("reach-red.json"), "--simple", "--bound", "1",
                                      "--trials", "30", "--seed", "5", "--random-graph", "n=8", "palette=0,1",
                                      "loops=1/4"};
  auto one = base;
  one.insert(one.end(), {"--jobs", "1", "--stats", lab.path("one.csv")});
  auto four = base;
  four.insert(four.end(), {"--jobs", "4", "--stats", lab.path("four.csv")});
  const auto a = lab.run(one);
  const auto b = lab.run(four);
  CHECK(a.code == exit_ok);
  CHECK(a.out == b.out);
  CHECK(lab.read("one.csv") == lab.read("four.csv"));
  CHECK(lab.read("one.csv").rfind("gap,count\n", 0) == 0);
  CHECK(lab.run({"verify", "--model", lab.path("reach-red.json"), "--trials", "3"}).code == exit_usage);
}

TEST_CASE("gen") {
  Lab lab("gen");
  const auto first = lab.run({"gen", "--random-graph", "n=6", "p=1/2", "seed=7"});
  const auto second = lab.run({"gen", "--random-graph", "n=6", "p=1/2", "seed=7"});
  CHECK(first.code == exit_ok);
  CHECK(first.out == second.out);

  const auto fixture = lab.run({"gen", "--gallery", "reach-red"});
  CHECK(fixture.out == model_text(gallery_get("reach-red").model));
  CHECK(lab.run({"gen", "--gallery", "nothing"}).code == exit_usage);
  CHECK(lab.run({"gen"}).code == exit_usage);
  CHECK(lab.run({"gen", "--random-graph", "n=3", "colour=blue"}).code == exit_usage);
  CHECK(lab.run({"gen", "--random-graph", "n=3", "p=3/2"}).code == exit_usage);

  const auto pair = lab.run({"gen", "--bisim-pair", "cycle-cover", "n=3", "k=2"});
  REQUIRE(pair.code == exit_ok);
  const auto j = nlohmann::json::parse(pair.out);
  lab.write("g.json", j["g"].dump());
  lab.write("h.json", j["h"].dump());
  lab.write("z.json", j["relation"].dump());
  CHECK(graph_from_json(j["g"]).size() == 6);
  const auto check = lab.run({"bisim", "check", "--g", lab.path("g.json"), "--h", lab.path("h.json"),
                              "--relation", lab.path("z.json")});
  CHECK(check.code == exit_ok);
  CHECK(nlohmann::json::parse(check.out)["totalSurjective"] == true);

  for (const char* kind : {"duplication", "lift", "random"}) {
    const auto a = lab.run({"gen", "--bisim-pair", kind, "n=5", "seed=3", "palette=0,1"});
    const auto b = lab.run({"gen", "--bisim-pair", kind, "n=5", "seed=3", "palette=0,1"});
    CHECK(a.code == exit_ok);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("bisim") {
  Lab lab("bisim");
  const auto cover = cycle_cover(3, 2);
  save_graph(cover.g, lab.path("g.json"));
  save_graph(cover.h, lab.path("h.json"));
  lab.write("z.json", relation_to_json(cover.relation).dump());
  lab.write("partial.json", R"({"pairs":[["v0","v0"]]})");

  const auto coarse = lab.run({"bisim", "coarsest", "--g", lab.path("g.json"), "--h", lab.path("h.json")});
  CHECK(coarse.code == exit_ok);
  const auto inv = lab.run({"bisim", "invariance", "--g", lab.path("g.json"), "--h", lab.path("h.json"),
                            "--relation", lab.path("z.json"), "--model", lab.path("counter-k.json")});
  CHECK(inv.code == exit_ok);
  const auto partial = lab.run({"bisim", "check", "--g", lab.path("g.json"), "--h", lab.path("h.json"),
                                "--relation", lab.path("partial.json")});
  CHECK(partial.code == exit_check_failed);
  CHECK(nlohmann::json::parse(partial.out)["totalSurjective"] == false);
  CHECK(lab.run({"bisim", "check", "--g", lab.path("g.json"), "--h", lab.path("h.json")}).code == exit_usage);
  CHECK(lab.run({"bisim", "guess", "--g", lab.path("g.json"), "--h", lab.path("h.json")}).code == exit_usage);
}
