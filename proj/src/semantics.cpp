#include "rgnn/semantics.hpp"

#include <unordered_map>

namespace rgnn {

std::string_view to_string(Certificate c) {
  switch (c) {
    case Certificate::state_fixed_point: return "state-fixed-point";
    case Certificate::all_halted: return "all-halted";
    case Certificate::output_cycle: return "output-cycle";
    case Certificate::output_window: return "output-window";
    case Certificate::budget_exhausted: return "budget-exhausted";
  }
  return "?";
}

Certificate certificate_from_string(std::string_view s) {
  for (auto c : {Certificate::state_fixed_point, Certificate::all_halted, Certificate::output_cycle,
                 Certificate::output_window, Certificate::budget_exhausted}) {
    if (to_string(c) == s) return c;
  }
  throw ParseError("unknown certificate '" + std::string(s) + "'");
}

LabelledGraph RunResult::output_graph() const {
  std::vector<RationalVector> labels;
  labels.reserve(output.size());
  for (bool b : output) labels.push_back(RationalVector{b ? 1 : 0});
  return trace.graph.with_labels(std::move(labels));
}

std::vector<bool> read_out(const Classifier& readout, const std::vector<RationalVector>& state) {
  std::vector<bool> out;
  out.reserve(state.size());
  for (const auto& x : state) out.push_back(readout(x));
  return out;
}

std::vector<RationalVector> initial_state(const RGNN& model, const LabelledGraph& g) {
  if (g.size() && g.label_dim() != model.label_dim()) {
    throw std::invalid_argument("graph labels have dimension " + std::to_string(g.label_dim()) +
                                ", model expects " + std::to_string(model.label_dim()));
  }
  std::vector<RationalVector> state;
  state.reserve(g.size());
  for (const auto& l : g.labels()) state.push_back(model.init(l));
  return state;
}

namespace {

RunTrace start_trace(const RGNN& model, const LabelledGraph& g) {
  model.validate();
  RunTrace trace;
  trace.graph = g;
  trace.states.push_back(initial_state(model, g));
  return trace;
}

std::vector<RationalVector> step(const ACLayer& layer, const RunTrace& trace,
                                 std::vector<ProtocolEvent>* events) {
  return layer.apply(trace.state_graph(trace.steps() - 1), events).labels();
}

std::string state_key(const std::vector<RationalVector>& state) {
  std::string key;
  for (const auto& x : state) {
    for (const auto& c : x) {
      key += c.str();
      key += ',';
    }
    key += ';';
  }
  return key;
}

}  // namespace

RunResult run_converging(const RGNN& model, const LabelledGraph& g, std::size_t max_steps) {
  return run_converging(model, g, RunOptions{max_steps, false});
}

RunResult run_converging(const RGNN& model, const LabelledGraph& g, const RunOptions& options) {
  RunTrace trace = start_trace(model, g);
  const bool record = options.record_events && model.layer.has_probe();
  for (std::size_t i = 0; i <= options.max_steps; ++i) {
    std::vector<ProtocolEvent> events;
    auto next = step(model.layer, trace, record ? &events : nullptr);
    if (record) trace.events.push_back(std::move(events));
    if (next == trace.states.back()) {
      trace.certificate = Certificate::state_fixed_point;
      trace.k = i;
      RunResult result{read_out(model.readout, trace.states.back()), i, std::move(trace)};
      return result;
    }
    if (i == options.max_steps) break;
    trace.states.push_back(std::move(next));
  }
  throw BudgetExhausted("no state fixed point within " + std::to_string(options.max_steps) +
                            " steps; the model may not converge on this graph",
                        std::move(trace));
}

RunResult run_halting(const HaltingRGNN& model, const LabelledGraph& g, std::size_t max_steps) {
  model.validate();
  RunTrace trace = start_trace(model.base, g);
  trace.k_gamma.assign(g.component_count(), std::nullopt);
  for (std::size_t i = 0;; ++i) {
    const auto& state = trace.states.back();
    std::vector<bool> component_halted(g.component_count(), true);
    for (std::size_t v = 0; v < g.size(); ++v) {
      if (!model.halt(state[v])) component_halted[g.component_of()[v]] = false;
    }
    bool all = true;
    for (std::size_t c = 0; c < g.component_count(); ++c) {
      if (component_halted[c] && !trace.k_gamma[c]) trace.k_gamma[c] = i;
      all = all && component_halted[c];
    }
    if (all) {
      trace.certificate = Certificate::all_halted;
      trace.k = i;
      RunResult result{read_out(model.base.readout, state), i, std::move(trace)};
      return result;
    }
    if (i == max_steps) break;
    trace.states.push_back(step(model.base.layer, trace, nullptr));
  }
  throw BudgetExhausted("not every vertex halted within " + std::to_string(max_steps) + " steps",
                        std::move(trace));
}

RunResult run_output_converging(const RGNN& model, const LabelledGraph& g, std::size_t max_steps,
                                std::size_t window) {
  if (window == 0) throw std::invalid_argument("output window must be at least 1");
  RunTrace trace = start_trace(model, g);
  std::vector<std::vector<bool>> outputs{read_out(model.readout, trace.states.back())};
  std::unordered_map<std::string, std::size_t> seen{{state_key(trace.states.back()), 0}};

  for (std::size_t i = 1; i <= max_steps + 1; ++i) {
    auto next = step(model.layer, trace, nullptr);
    const auto key = state_key(next);
    if (auto it = seen.find(key); it != seen.end()) {
      // H_i = H_s: the run cycles through H_s .. H_{i-1} forever.
      const std::size_t start = it->second;
      const auto& cycle_output = outputs[start];
      for (std::size_t j = start + 1; j < i; ++j) {
        if (outputs[j] != cycle_output) {
          throw UnstableOutputCycle("state cycle of period " + std::to_string(i - start) +
                                        " from step " + std::to_string(start) +
                                        " has changing output; the run does not output-converge",
                                    start, i - start, std::move(trace));
        }
      }
      std::size_t k = start;
      while (k > 0 && outputs[k - 1] == cycle_output) --k;
      trace.certificate = Certificate::output_cycle;
      trace.k = k;
      RunResult result{cycle_output, k, std::move(trace)};
      return result;
    }
    if (i == max_steps + 1) break;
    seen.emplace(key, i);
    outputs.push_back(read_out(model.readout, next));
    trace.states.push_back(std::move(next));
  }

  // No state repeated: fall back on output stability over the last window.
  const std::size_t last = outputs.size() - 1;
  std::size_t k = last;
  while (k > 0 && outputs[k - 1] == outputs[last]) --k;
  if (last - k >= window) {
    trace.certificate = Certificate::output_window;
    trace.k = k;
    RunResult result{outputs[last], k, std::move(trace)};
    return result;
  }
  throw BudgetExhausted("neither a state cycle nor " + std::to_string(window) +
                            " steps of stable output within " + std::to_string(max_steps) +
                            " steps",
                        std::move(trace));
}

}  // namespace rgnn
