#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rgnn/model.hpp"
#include "rgnn/semantics.hpp"

namespace rgnn {

/// phi[j][v]: index of the halting state vertex v simulates at converging
/// step j, counted from the advancing events.
struct Correspondence {
  std::vector<std::vector<std::size_t>> phi;

  std::size_t steps() const { return phi.size(); }
  std::size_t at(std::size_t v, std::size_t j) const { return phi.at(j).at(v); }
};

/// Phi(v, 0) = 0 and Phi(v, j + 1) = Phi(v, j) + [v advances at j]. When the
/// trace ends in a state fixed point the row after the last state is
/// included. Throws std::invalid_argument when the trace has no events.
Correspondence extract_correspondence(const RunTrace& converging);

struct CheckFailure {
  std::string check;
  std::optional<std::size_t> vertex;
  std::optional<std::size_t> step;
  std::string detail;
};

struct ComponentSummary {
  std::size_t first_vertex = 0;
  std::optional<std::size_t> k_gamma;
  std::optional<std::size_t> j_prime;
};

/// Result of checking a converging trace against the halting run.
///
/// Check names: "coherence-1" .. "coherence-4", "predicates", "decode",
/// "lemma-a" .. "lemma-f" and "trace" for malformed input.
struct CoherenceReport {
  static constexpr std::size_t kept_failures = 200;

  std::map<std::string, std::size_t> evaluated;
  std::map<std::string, std::size_t> failed;
  /// First failures, at most `kept_failures`.
  std::vector<CheckFailure> failures;
  std::vector<ComponentSummary> components;
  std::optional<std::size_t> halting_k;
  std::size_t converging_steps = 0;
  /// gap_histogram[g]: (edge, step) pairs whose endpoints differ by g in Phi.
  std::vector<std::size_t> gap_histogram;

  bool ok() const { return failed.empty(); }
  std::size_t max_gap() const { return gap_histogram.empty() ? 0 : gap_histogram.size() - 1; }
  void record(const std::string& check, bool pass, std::optional<std::size_t> vertex,
              std::optional<std::size_t> step, const std::string& detail);
};

/// Inputs shared by the coherence and lemma checks.
struct VerificationInput {
  const HaltingRGNN& source;
  const RGNN& derived;
  const RunTrace& converging;
  /// Halting run of `source` on the same graph.
  const RunTrace& halting;
};

/// Coherence 1-4 at every step, the event flags against the Phi-defined
/// predicates, and the traffic-light decoding of Phi.
void check_coherence(const Correspondence& phi, const VerificationInput& in, CoherenceReport& report);

/// Lemmas (a)-(f) per step and component, using component-local k_Gamma.
void check_lemmas(const Correspondence& phi, const VerificationInput& in, CoherenceReport& report);

/// Runs the halting model itself and checks the given converging trace.
CoherenceReport verify_trace(const HaltingRGNN& source, const RGNN& derived,
                             const RunTrace& converging, std::size_t max_steps);

/// Runs both models on `g` and checks the pair.
CoherenceReport verify_run(const HaltingRGNN& source, const RGNN& derived, const LabelledGraph& g,
                           std::size_t max_steps);

nlohmann::json report_to_json(const CoherenceReport& report, const LabelledGraph& g);

}  // namespace rgnn
