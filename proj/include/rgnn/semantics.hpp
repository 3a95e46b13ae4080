#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rgnn/graph.hpp"
#include "rgnn/model.hpp"

namespace rgnn {

enum class Certificate {
  state_fixed_point,
  all_halted,
  output_cycle,
  output_window,
  budget_exhausted,
};

std::string_view to_string(Certificate c);
Certificate certificate_from_string(std::string_view s);

/// Recorded run H_0, H_1, ... of a model on one input graph.
struct RunTrace {
  /// Input graph; every state shares its vertices and edges.
  LabelledGraph graph;
  /// states[i][v] = H_i(v).
  std::vector<std::vector<RationalVector>> states;
  /// events[i][v]: decision taken at H_i when the layer is instrumented.
  std::vector<std::vector<ProtocolEvent>> events;
  Certificate certificate = Certificate::budget_exhausted;
  std::optional<std::size_t> k;
  /// First index at which every vertex of component c halts (halting runs).
  std::vector<std::optional<std::size_t>> k_gamma;

  std::size_t steps() const { return states.size(); }
  LabelledGraph state_graph(std::size_t i) const { return graph.with_labels(states.at(i)); }
  bool has_events() const { return !events.empty(); }
};

struct RunResult {
  std::vector<bool> output;
  std::size_t k = 0;
  RunTrace trace;

  /// Output as a graph with labels (1) for true and (0) for false.
  LabelledGraph output_graph() const;
};

/// No certificate was reached within the step budget.
class BudgetExhausted : public std::runtime_error {
 public:
  BudgetExhausted(const std::string& what, RunTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const RunTrace& trace() const { return trace_; }

 private:
  RunTrace trace_;
};

/// The run revisited a state while its output was still changing, so it
/// never output-converges.
class UnstableOutputCycle : public std::runtime_error {
 public:
  UnstableOutputCycle(const std::string& what, std::size_t cycle_start, std::size_t period,
                      RunTrace trace)
      : std::runtime_error(what), cycle_start_(cycle_start), period_(period),
        trace_(std::move(trace)) {}
  std::size_t cycle_start() const { return cycle_start_; }
  std::size_t period() const { return period_; }
  const RunTrace& trace() const { return trace_; }

 private:
  std::size_t cycle_start_;
  std::size_t period_;
  RunTrace trace_;
};

struct RunOptions {
  std::size_t max_steps = 1000;
  /// Record probe events (instrumented layers only).
  bool record_events = false;
};

/// Iterates until L(H_k) = H_k, checking k = 0 .. max_steps.
RunResult run_converging(const RGNN& model, const LabelledGraph& g, const RunOptions& options);
RunResult run_converging(const RGNN& model, const LabelledGraph& g, std::size_t max_steps);

/// Stops at the first k <= max_steps where Hlt holds at every vertex; also
/// records the first such index per connected component.
RunResult run_halting(const HaltingRGNN& model, const LabelledGraph& g, std::size_t max_steps);

/// Semi-decision for output convergence.
///
/// A revisited state proves the run eventually periodic; if every state on
/// the cycle has the same output the result carries Certificate::output_cycle
/// and k is the first index from which the output never changes, otherwise
/// UnstableOutputCycle is thrown. When no state repeats within the budget but
/// the last `window` steps kept one output, the result is the heuristic
/// Certificate::output_window.
RunResult run_output_converging(const RGNN& model, const LabelledGraph& g, std::size_t max_steps,
                                std::size_t window);

/// Readout applied to every vertex of one state.
std::vector<bool> read_out(const Classifier& readout, const std::vector<RationalVector>& state);

/// Initial state In(G).
std::vector<RationalVector> initial_state(const RGNN& model, const LabelledGraph& g);

}  // namespace rgnn
