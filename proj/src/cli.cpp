#include "rgnn/cli.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "rgnn/bisim.hpp"
#include "rgnn/c2h.hpp"
#include "rgnn/gallery.hpp"
#include "rgnn/h2c.hpp"
#include "rgnn/model_io.hpp"
#include "rgnn/random_graph.hpp"
#include "rgnn/semantics.hpp"
#include "rgnn/trace_io.hpp"
#include "rgnn/verify.hpp"

namespace rgnn {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::size_t fallback_max_steps = 1000;

std::size_t default_max_steps() {
  const char* env = std::getenv("RGNN_LAB_MAX_STEPS_DEFAULT");
  if (!env || !*env) return fallback_max_steps;
  const std::string text(env);
  if (text.find_first_not_of("0123456789") != std::string::npos || text.size() > 18) {
    throw UsageError("RGNN_LAB_MAX_STEPS_DEFAULT must be a natural number, got '" + text + "'");
  }
  return std::stoull(text);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

void emit(std::ostream& out, const std::optional<std::string>& path, const std::string& text) {
  if (path) {
    write_file(*path, text);
  } else {
    out << text;
  }
}

// "n=6 p=1/2 seed=7" split into a map; every key must be one of `allowed`.
std::map<std::string, std::string> key_values(const std::vector<std::string>& tokens,
                                              std::initializer_list<std::string_view> allowed) {
  std::map<std::string, std::string> out;
  for (const auto& token : tokens) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw UsageError("expected key=value, got '" + token + "'");
    const auto key = token.substr(0, eq);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw UsageError("unknown parameter '" + key + "'");
    }
    out[key] = token.substr(eq + 1);
  }
  return out;
}

std::size_t natural(const std::map<std::string, std::string>& kv, const std::string& key,
                    std::optional<std::size_t> fallback = std::nullopt) {
  auto it = kv.find(key);
  if (it == kv.end()) {
    if (fallback) return *fallback;
    throw UsageError("missing parameter " + key + "=");
  }
  if (it->second.empty() || it->second.find_first_not_of("0123456789") != std::string::npos) {
    throw UsageError(key + " must be a natural number");
  }
  return std::stoull(it->second);
}

std::vector<RationalVector> palette_from(const std::string& text) {
  std::vector<RationalVector> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(RationalVector{Rational::parse(item)});
  if (out.empty()) throw UsageError("empty palette");
  return out;
}

struct GraphSpec {
  RandomGraphParams params;
  std::uint64_t seed = 0;
};

GraphSpec graph_spec(const std::vector<std::string>& tokens) {
  const auto kv = key_values(tokens, {"n", "p", "seed", "palette", "loops"});
  GraphSpec spec;
  spec.params.n = natural(kv, "n");
  spec.seed = natural(kv, "seed", 0);
  if (kv.contains("p")) spec.params.p = Rational::parse(kv.at("p"));
  if (kv.contains("loops")) spec.params.loops = Rational::parse(kv.at("loops"));
  if (kv.contains("palette")) spec.params.palette = palette_from(kv.at("palette"));
  for (const auto* p : {&spec.params.p, &spec.params.loops}) {
    if (p->sign() < 0 || *p > Rational(1)) throw UsageError("probabilities must lie in [0, 1]");
  }
  return spec;
}

nlohmann::json output_json(const LabelledGraph& g, const std::vector<bool>& output) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t v = 0; v < g.size(); ++v) j[g.id(v)] = static_cast<bool>(output[v]);
  return j;
}

nlohmann::json summary_json(const RunResult& r) {
  return {{"k", r.k},
          {"certificate", std::string(to_string(r.trace.certificate))},
          {"output", output_json(r.trace.graph, r.output)}};
}

void maybe_save_trace(const std::optional<std::string>& path, const RunTrace& trace) {
  if (!path) return;
  std::ostringstream text;
  write_trace(text, trace);
  write_file(*path, text.str());
}

// ---- run ----

struct RunArgs {
  std::string model, graph, semantics;
  std::optional<std::size_t> max_steps;
  std::size_t window = 10;
  std::optional<std::string> trace;
  bool events = false;
};

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  const auto model = load_model(a.model);
  const auto g = load_graph(a.graph);
  const auto semantics = semantics_from_string(a.semantics);
  const auto max_steps = a.max_steps.value_or(default_max_steps());
  const auto* rgnn = std::get_if<RGNN>(&model);
  const auto* halting = std::get_if<HaltingRGNN>(&model);
  if (semantics == Semantics::halting && !halting) {
    throw UsageError("halting semantics needs a halting model");
  }
  if (semantics != Semantics::halting && !rgnn) {
    throw UsageError(std::string(to_string(semantics)) + " semantics needs an RGNN, not a halting model");
  }
  try {
    RunResult result;
    switch (semantics) {
      case Semantics::converging:
        result = run_converging(*rgnn, g, RunOptions{max_steps, a.events});
        break;
      case Semantics::halting:
        result = run_halting(*halting, g, max_steps);
        break;
      case Semantics::output_converging:
        result = run_output_converging(*rgnn, g, max_steps, a.window);
        break;
    }
    maybe_save_trace(a.trace, result.trace);
    out << summary_json(result).dump() << '\n';
    return exit_ok;
  } catch (const BudgetExhausted& e) {
    maybe_save_trace(a.trace, e.trace());
    err << "budget exhausted: " << e.what() << '\n';
    out << nlohmann::json{{"k", nullptr}, {"certificate", "budget-exhausted"}}.dump() << '\n';
    return exit_budget;
  } catch (const UnstableOutputCycle& e) {
    maybe_save_trace(a.trace, e.trace());
    err << "not output-converging: " << e.what() << '\n';
    out << nlohmann::json{{"k", nullptr},
                          {"certificate", "unstable-output-cycle"},
                          {"cycleStart", e.cycle_start()},
                          {"period", e.period()}}
               .dump()
        << '\n';
    return exit_unstable_output;
  }
}

// ---- transform ----

struct TransformArgs {
  std::string direction, model;
  bool simple = false;
  std::optional<std::string> bound, out;
};

int cmd_transform(const TransformArgs& a, std::ostream& out) {
  const auto model = load_model(a.model);
  std::optional<Model> derived;
  if (a.direction == "c2h") {
    const auto* c = std::get_if<RGNN>(&model);
    if (!c) throw UsageError("c2h needs an RGNN, not a halting model");
    if (a.bound) throw UsageError("--bound only applies to h2c");
    derived = a.simple ? to_halting_simple(*c) : to_halting(*c);
  } else if (a.direction == "h2c") {
    const auto* h = std::get_if<HaltingRGNN>(&model);
    if (!h) throw UsageError("h2c needs a halting model");
    if (a.simple) {
      if (!a.bound) throw UsageError("h2c --simple needs --bound B");
      derived = to_converging_simple(*h, Rational::parse(*a.bound));
    } else {
      if (a.bound) throw UsageError("--bound only applies with --simple");
      derived = to_converging(*h);
    }
  } else {
    throw UsageError("--direction must be c2h or h2c");
  }
  emit(out, a.out, model_text(*derived));
  return exit_ok;
}

// ---- verify ----

struct VerifyArgs {
  std::string model;
  std::optional<std::string> derived, graph, trace, report, stats, bound;
  std::vector<std::string> random;
  bool simple = false;
  std::optional<std::size_t> max_steps;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

RGNN derived_for(const VerifyArgs& a, const HaltingRGNN& source) {
  if (a.derived) {
    auto m = load_model(*a.derived);
    if (auto* c = std::get_if<RGNN>(&m)) return std::move(*c);
    throw UsageError("--derived must be an RGNN");
  }
  if (a.simple) {
    if (!a.bound) throw UsageError("--simple needs --bound B");
    return to_converging_simple(source, Rational::parse(*a.bound));
  }
  return to_converging(source);
}

// Events are recomputed from the states when the trace file carries none.
RunTrace with_events(RunTrace trace, const RGNN& derived) {
  if (trace.has_events() || !derived.layer.has_probe()) return trace;
  for (std::size_t i = 0; i < trace.steps(); ++i) {
    std::vector<ProtocolEvent> events;
    derived.layer.apply(trace.state_graph(i), &events);
    trace.events.push_back(std::move(events));
  }
  return trace;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  const auto source = load_halting(a.model);
  const auto derived = derived_for(a, source);
  const auto max_steps = a.max_steps.value_or(default_max_steps());

  if (a.trials == 0) {
    if (!a.graph) throw UsageError("verify needs --graph (or --trials with --random-graph)");
    const auto g = load_graph(*a.graph);
    CoherenceReport report;
    try {
      report = a.trace ? verify_trace(source, derived, with_events(load_trace(*a.trace, g), derived),
                                      max_steps)
                       : verify_run(source, derived, g, max_steps);
    } catch (const BudgetExhausted& e) {
      err << "halting run exhausted its budget: " << e.what() << '\n';
      return exit_budget;
    }
    emit(out, a.report, report_to_json(report, g).dump(2) + "\n");
    if (!report.ok()) err << "verification failed (" << report.failed.size() << " checks)\n";
    return report.ok() ? exit_ok : exit_check_failed;
  }

  if (a.random.empty()) throw UsageError("--trials needs --random-graph n=.. [p=..] [palette=..]");
  if (a.trace) throw UsageError("--trace and --trials are exclusive");
  const auto spec = graph_spec(a.random);
  struct Trial {
    bool ok = false;
    bool budget = false;
    std::vector<std::size_t> gaps;
    std::string first_failure;
  };
  std::vector<Trial> results(a.trials);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t t = next++; t < a.trials; t = next++) {
      auto params = spec.params;
      const auto g = random_graph(params, a.seed + t);
      try {
        const auto r = verify_run(source, derived, g, max_steps);
        results[t].ok = r.ok();
        results[t].gaps = r.gap_histogram;
        if (!r.failures.empty()) results[t].first_failure = r.failures.front().check + ": " + r.failures.front().detail;
      } catch (const BudgetExhausted&) {
        results[t].budget = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < std::max<std::size_t>(1, a.jobs); ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::vector<std::size_t> histogram;
  nlohmann::json failed = nlohmann::json::array();
  std::size_t budget = 0;
  for (std::size_t t = 0; t < a.trials; ++t) {
    const auto& r = results[t];
    for (std::size_t gap = 0; gap < r.gaps.size(); ++gap) {
      if (histogram.size() <= gap) histogram.resize(gap + 1, 0);
      histogram[gap] += r.gaps[gap];
    }
    budget += r.budget ? 1 : 0;
    if (!r.ok) failed.push_back({{"trial", t}, {"seed", a.seed + t}, {"firstFailure", r.budget ? "halting budget exhausted" : r.first_failure}});
  }
  nlohmann::json summary{{"trials", a.trials},
                         {"passed", a.trials - failed.size()},
                         {"failed", failed},
                         {"gapHistogram", histogram}};
  emit(out, a.report, summary.dump(2) + "\n");
  if (a.stats) {
    std::string csv = "gap,count\n";
    for (std::size_t gap = 0; gap < histogram.size(); ++gap) {
      csv += std::to_string(gap) + "," + std::to_string(histogram[gap]) + "\n";
    }
    write_file(*a.stats, csv);
  }
  if (budget) err << budget << " trial(s) exhausted the halting budget\n";
  return failed.empty() ? exit_ok : exit_check_failed;
}

// ---- bisim ----

struct BisimArgs {
  std::string g, h;
  std::optional<std::string> relation, model, out;
  std::optional<std::size_t> max_steps;
};

LabelTransformer model_transformer(const Model& model, std::size_t max_steps) {
  if (const auto* h = std::get_if<HaltingRGNN>(&model)) {
    return [h = *h, max_steps](const LabelledGraph& g) { return run_halting(h, g, max_steps).output_graph(); };
  }
  const auto& r = std::get<RGNN>(model);
  return [r, max_steps](const LabelledGraph& g) { return run_converging(r, g, max_steps).output_graph(); };
}

int cmd_bisim(const std::string& action, const BisimArgs& a, std::ostream& out, std::ostream& err) {
  const auto g = load_graph(a.g);
  const auto h = load_graph(a.h);
  const auto relation = [&] {
    if (!a.relation) throw UsageError("bisim " + action + " needs --relation");
    std::ifstream in(*a.relation);
    if (!in) throw ParseError("cannot open relation file " + *a.relation);
    try {
      return relation_from_json(nlohmann::json::parse(in), g, h);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("relation is not JSON: ") + e.what());
    }
  };
  const auto verdict = [](const BisimCheck& c) {
    nlohmann::json j{{"ok", c.ok}};
    if (c.violation) j["violation"] = {c.violation->first, c.violation->second};
    if (!c.ok) j["reason"] = c.reason;
    return j;
  };
  if (action == "coarsest") {
    emit(out, a.out, partition_to_json(coarsest_graded_bisimulation(g, h), g, h).dump(2) + "\n");
    return exit_ok;
  }
  if (action == "check") {
    const auto z = relation();
    const auto c = check_graded_bisimulation(g, h, z);
    auto j = verdict(c);
    j["totalSurjective"] = is_totally_surjective(z, g, h);
    emit(out, a.out, j.dump() + "\n");
    return c ? exit_ok : exit_check_failed;
  }
  if (action == "invariance") {
    if (!a.model) throw UsageError("bisim invariance needs --model");
    const auto z = relation();
    const auto f = model_transformer(load_model(*a.model), a.max_steps.value_or(default_max_steps()));
    try {
      const auto c = check_transformer_invariance(f, g, h, z);
      emit(out, a.out, verdict(c).dump() + "\n");
      return c ? exit_ok : exit_check_failed;
    } catch (const std::invalid_argument& e) {
      err << e.what() << '\n';
      return exit_usage;
    }
  }
  throw UsageError("bisim action must be check, coarsest or invariance");
}

// ---- gen ----

struct GenArgs {
  std::vector<std::string> random_graph, bisim_pair;
  std::optional<std::string> gallery, out;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  const int chosen = !a.random_graph.empty() + !a.bisim_pair.empty() + a.gallery.has_value();
  if (chosen != 1) throw UsageError("gen needs exactly one of --random-graph, --bisim-pair, --gallery");
  if (!a.random_graph.empty()) {
    const auto spec = graph_spec(a.random_graph);
    emit(out, a.out, graph_text(random_graph(spec.params, spec.seed)));
    return exit_ok;
  }
  if (a.gallery) {
    emit(out, a.out, model_text(gallery_get(*a.gallery).model));
    return exit_ok;
  }
  const auto& kind = a.bisim_pair.front();
  const std::vector<std::string> rest(a.bisim_pair.begin() + 1, a.bisim_pair.end());
  BisimilarPair pair;
  if (kind == "cycle-cover") {
    const auto kv = key_values(rest, {"n", "k"});
    pair = cycle_cover(natural(kv, "n"), natural(kv, "k", 2));
  } else if (kind == "duplication" || kind == "lift" || kind == "random") {
    const auto kv = key_values(rest, {"n", "k", "seed", "p", "palette", "loops"});
    std::vector<std::string> graph_tokens;
    for (const auto& [k, v] : kv) {
      if (k != "k") graph_tokens.push_back(k + "=" + v);
    }
    const auto spec = graph_spec(graph_tokens);
    if (kind == "random") {
      pair = generate_bisimilar_pair(spec.seed, spec.params.n, spec.params.palette);
    } else {
      const auto base = random_graph(spec.params, spec.seed);
      pair = kind == "duplication" ? duplication(base) : covering_lift(base, natural(kv, "k", 2), spec.seed);
    }
  } else {
    throw UsageError("--bisim-pair kind must be cycle-cover, duplication, lift or random");
  }
  const nlohmann::json j{{"g", graph_to_json(pair.g)},
                         {"h", graph_to_json(pair.h)},
                         {"relation", relation_to_json(pair.relation)}};
  emit(out, a.out, j.dump(2) + "\n");
  return exit_ok;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Recurrent GNN semantics lab: run, compile between halting and converging models, "
               "verify, check graded bisimulations"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "run a model on a graph");
  run_cmd->add_option("--model", run.model, "model JSON")->required();
  run_cmd->add_option("--graph", run.graph, "graph JSON")->required();
  run_cmd->add_option("--semantics", run.semantics, "converging | halting | output-converging")->required();
  run_cmd->add_option("--max-steps", run.max_steps, "step budget");
  run_cmd->add_option("--window", run.window, "stable-output window (output-converging)");
  run_cmd->add_option("--trace", run.trace, "write the run as JSON lines");
  run_cmd->add_flag("--events", run.events, "record protocol events (converging)");

  TransformArgs tr;
  auto* tr_cmd = app.add_subcommand("transform", "compile between converging and halting models");
  tr_cmd->add_option("--direction", tr.direction, "c2h | h2c")->required();
  tr_cmd->add_option("--model", tr.model, "source model JSON")->required();
  tr_cmd->add_flag("--simple", tr.simple, "emit a ReLU-only model");
  tr_cmd->add_option("--bound", tr.bound, "per-step change bound B (h2c --simple)");
  tr_cmd->add_option("--out", tr.out, "output path (default stdout)");

  VerifyArgs ver;
  auto* ver_cmd = app.add_subcommand("verify", "check a compiled run against the halting run");
  ver_cmd->add_option("--model", ver.model, "halting model JSON")->required();
  ver_cmd->add_option("--derived", ver.derived, "compiled converging model (default: compile now)");
  ver_cmd->add_option("--graph", ver.graph, "graph JSON");
  ver_cmd->add_option("--trace", ver.trace, "converging trace to check instead of running");
  ver_cmd->add_option("--report", ver.report, "report path (default stdout)");
  ver_cmd->add_flag("--simple", ver.simple, "compile with the simple variant");
  ver_cmd->add_option("--bound", ver.bound, "change bound for --simple");
  ver_cmd->add_option("--max-steps", ver.max_steps, "step budget for both runs");
  ver_cmd->add_option("--trials", ver.trials, "number of random graphs");
  ver_cmd->add_option("--seed", ver.seed, "seed of the first trial");
  ver_cmd->add_option("--jobs", ver.jobs, "parallel trials")->check(CLI::PositiveNumber);
  ver_cmd->add_option("--random-graph", ver.random, "n=.. [p=..] [palette=..] [loops=..]")->expected(1, -1);
  ver_cmd->add_option("--stats", ver.stats, "write the gap histogram as CSV");

  BisimArgs bis;
  std::string bis_action;
  auto* bis_cmd = app.add_subcommand("bisim", "graded bisimulation tools");
  bis_cmd->set_help_flag("--help", "Print this help message and exit");
  bis_cmd->add_option("action", bis_action, "check | coarsest | invariance")->required();
  bis_cmd->add_option("--g", bis.g, "first graph")->required();
  bis_cmd->add_option("--h", bis.h, "second graph")->required();
  bis_cmd->add_option("--relation", bis.relation, "relation JSON");
  bis_cmd->add_option("--model", bis.model, "model whose output is the transformer (invariance)");
  bis_cmd->add_option("--max-steps", bis.max_steps, "step budget (invariance)");
  bis_cmd->add_option("--out", bis.out, "output path (default stdout)");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate graphs, bisimilar pairs or gallery models");
  gen_cmd->add_option("--random-graph", gen.random_graph, "n=.. [p=..] [seed=..] [palette=..] [loops=..]")
      ->expected(1, -1);
  gen_cmd->add_option("--bisim-pair", gen.bisim_pair, "cycle-cover n=.. k=.. | duplication|lift|random n=.. seed=..")
      ->expected(1, -1);
  gen_cmd->add_option("--gallery", gen.gallery, "gallery model name");
  gen_cmd->add_option("--out", gen.out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (*run_cmd) return cmd_run(run, out, err);
    if (*tr_cmd) return cmd_transform(tr, out);
    if (*ver_cmd) return cmd_verify(ver, out, err);
    if (*bis_cmd) return cmd_bisim(bis_action, bis, out, err);
    if (*gen_cmd) return cmd_gen(gen, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_usage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return exit_usage;
  } catch (const NotSimpleInput& e) {
    err << "not simple: " << e.what() << '\n';
    return exit_usage;
  } catch (const BudgetExhausted& e) {
    err << "budget exhausted: " << e.what() << '\n';
    return exit_budget;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }
  return exit_usage;
}

}  // namespace rgnn
