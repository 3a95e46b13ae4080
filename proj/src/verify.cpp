#include "rgnn/verify.hpp"

#include <algorithm>
#include <stdexcept>

#include "rgnn/h2c.hpp"
#include "rgnn/traffic_light.hpp"

namespace rgnn {

void CoherenceReport::record(const std::string& check, bool pass, std::optional<std::size_t> vertex,
                             std::optional<std::size_t> step, const std::string& detail) {
  ++evaluated[check];
  if (pass) return;
  ++failed[check];
  if (failures.size() < kept_failures) failures.push_back(CheckFailure{check, vertex, step, detail});
}

namespace {

using State = std::vector<RationalVector>;

// Converging states C_0 .. C_J; a state fixed point repeats once more so the
// decision taken at the last recorded state is checked as well.
std::vector<const State*> converging_states(const RunTrace& c) {
  std::vector<const State*> out;
  for (const auto& s : c.states) out.push_back(&s);
  if (c.certificate == Certificate::state_fixed_point && !c.states.empty()) out.push_back(&c.states.back());
  return out;
}

// Halting states H_0 .. H_{k+1}.
std::vector<State> halting_states(const HaltingRGNN& source, const RunTrace& h) {
  std::vector<State> out = h.states;
  if (!out.empty()) out.push_back(source.base.layer.apply(h.state_graph(h.steps() - 1)).labels());
  return out;
}

class Checker {
 public:
  Checker(const Correspondence& phi, const VerificationInput& in, CoherenceReport& report)
      : phi_(phi), in_(in), report_(report), g_(in.converging.graph), d_(in.source.dim()),
        at_(ConfigLayout{d_}), c_(converging_states(in.converging)),
        h_(halting_states(in.source, in.halting)) {
    if (phi_.steps() < c_.size()) {
      throw std::invalid_argument("correspondence is shorter than the converging trace");
    }
  }

  std::size_t last() const { return c_.size() - 1; }

  RationalVector kappa_c(std::size_t v, std::size_t j) const { return block(v, j, at_.kappa_c(), d_); }
  RationalVector tau_c(std::size_t v, std::size_t j) const { return block(v, j, at_.tau_c(), 3); }
  RationalVector kappa_m(std::size_t v, std::size_t j) const { return block(v, j, at_.kappa_m(), d_); }
  RationalVector tau_m(std::size_t v, std::size_t j) const { return block(v, j, at_.tau_m(), 3); }

  const RationalVector* halting(std::size_t i, std::size_t v) const {
    return i < h_.size() ? &h_[i][v] : nullptr;
  }

  std::size_t phi(std::size_t v, std::size_t j) const { return phi_.at(v, j); }

  bool behind(std::size_t v, std::size_t j) const {
    for (auto u : g_.neighbours(v)) {
      if (phi(u, j) > phi(v, j)) return true;
    }
    return false;
  }

  bool aligned(std::size_t v, std::size_t j) const {
    const auto m = phi(v, j);
    const auto light = enc3(m).to_vector();
    for (auto u : g_.neighbours(v)) {
      const auto* hu = halting(m, u);
      if (!hu || kappa_m(u, j) != *hu || tau_m(u, j) != light) return false;
    }
    return true;
  }

  bool eager(std::size_t v, std::size_t j) const {
    if (behind(v, j)) return true;
    const auto* hv = halting(phi(v, j), v);
    return hv && !in_.source.halt(*hv);
  }

  template <class Detail>
  void expect(const char* check, bool pass, std::optional<std::size_t> v, std::optional<std::size_t> j,
              Detail&& detail) {
    report_.record(check, pass, v, j, pass ? std::string() : detail());
  }

  void coherence() {
    const auto first_light = enc3(0).to_vector();
    for (std::size_t j = 0; j <= last(); ++j) {
      for (std::size_t v = 0; v < g_.size(); ++v) {
        const auto m = phi(v, j);
        const auto* hv = halting(m, v);
        const auto kc = kappa_c(v, j);
        expect("coherence-1", hv && kc == *hv, v, j, [&] {
          return hv ? "current snapshot " + kc.str() + " != H_" + std::to_string(m) + " = " + hv->str()
                    : "no halting state H_" + std::to_string(m);
        });
        const auto tc = tau_c(v, j);
        expect("coherence-2", tc == enc3(m).to_vector(), v, j, [&] {
          return "current light " + tc.str() + " != enc3(" + std::to_string(m) + ")";
        });
        const auto km = kappa_m(v, j);
        const auto tm = tau_m(v, j);
        if (j == 0) {
          expect("coherence-3", km == h_[0][v] && tm == first_light, v, j,
                 [&] { return "initial advertised block " + km.str() + tm.str() + " != (H_0, enc3(0))"; });
        } else {
          const auto prev_kc = kappa_c(v, j - 1);
          const auto prev_tc = tau_c(v, j - 1);
          expect("coherence-3", km == prev_kc && tm == prev_tc, v, j, [&] {
            return "advertised " + km.str() + tm.str() + " != previous current " + prev_kc.str() +
                   prev_tc.str();
          });
        }
      }
      for (const auto& [u, v] : g_.edges()) {
        if (u == v) continue;
        const auto gap = std::max(phi(u, j), phi(v, j)) - std::min(phi(u, j), phi(v, j));
        if (report_.gap_histogram.size() <= gap) report_.gap_histogram.resize(gap + 1, 0);
        ++report_.gap_histogram[gap];
        expect("coherence-4", gap <= 1, u, j, [&] {
          return "neighbours " + g_.id(u) + " and " + g_.id(v) + " differ by " + std::to_string(gap);
        });
      }
    }
    predicates();
    decode();
  }

  void predicates() {
    const auto& events = in_.converging.events;
    for (std::size_t j = 0; j < last(); ++j) {
      for (std::size_t v = 0; v < g_.size(); ++v) {
        const auto& e = events[j][v];
        const bool b = behind(v, j), a = aligned(v, j), ea = eager(v, j);
        expect("predicates", e.behind == b && e.aligned == a && e.eager == ea &&
                                 e.advancing == (e.aligned && e.eager),
               v, j, [&] {
                 return "event (advancing " + std::to_string(e.advancing) + ", behind " +
                        std::to_string(e.behind) + ", aligned " + std::to_string(e.aligned) +
                        ", eager " + std::to_string(e.eager) + ") but from Phi behind " +
                        std::to_string(b) + ", aligned " + std::to_string(a) + ", eager " +
                        std::to_string(ea);
               });
      }
    }
  }

  // Phi recovered from the lights alone: the phase moves by 0 or 1 per step.
  void decode() {
    for (std::size_t v = 0; v < g_.size(); ++v) {
      std::size_t decoded = 0;
      std::optional<std::size_t> phase;
      for (std::size_t j = 0; j <= last(); ++j) {
        std::optional<std::size_t> now;
        try {
          now = TrafficLight::from_vector(tau_c(v, j)).phase();
        } catch (const std::invalid_argument&) {
        }
        if (!now) {
          expect("decode", false, v, j, [] { return std::string("current light is not one-hot"); });
          break;
        }
        if (j == 0) {
          expect("decode", *now == 0, v, j, [] { return std::string("initial light is not enc3(0)"); });
        } else {
          const auto step = (*now + 3 - *phase) % 3;
          if (step > 1) {
            expect("decode", false, v, j, [] { return std::string("light moved backwards"); });
            break;
          }
          decoded += step;
        }
        phase = now;
        expect("decode", decoded == phi(v, j), v, j, [&] {
          return "lights give " + std::to_string(decoded) + ", events give " + std::to_string(phi(v, j));
        });
      }
    }
  }

  void lemmas() {
    const auto comps = g_.components();
    const auto& kg = in_.halting.k_gamma;
    std::vector<bool> expected_out;
    for (std::size_t v = 0; v < g_.size(); ++v) {
      expected_out.push_back(in_.source.base.readout(in_.halting.states.back()[v]));
    }
    report_.components.clear();
    for (std::size_t c = 0; c < comps.size(); ++c) {
      ComponentSummary summary{comps[c].front(), c < kg.size() ? kg[c] : std::nullopt, std::nullopt};
      if (!summary.k_gamma) {
        expect("lemma-c", false, comps[c].front(), std::nullopt,
               [] { return std::string("component never halts in the halting run"); });
        report_.components.push_back(summary);
        continue;
      }
      const auto k_gamma = *summary.k_gamma;
      for (std::size_t j = 0; j <= last(); ++j) {
        bool all_at_k = true;
        for (auto v : comps[c]) {
          expect("lemma-b", phi(v, j) <= k_gamma, v, j, [&] {
            return "Phi = " + std::to_string(phi(v, j)) + " exceeds k_Gamma = " + std::to_string(k_gamma);
          });
          all_at_k = all_at_k && phi(v, j) == k_gamma;
        }
        if (all_at_k && !summary.j_prime) summary.j_prime = j;
      }
      expect("lemma-c", summary.j_prime.has_value(), comps[c].front(), std::nullopt, [&] {
        return "component never reaches k_Gamma = " + std::to_string(k_gamma) + " within " +
               std::to_string(last()) + " steps";
      });
      if (summary.j_prime) {
        const auto jp = *summary.j_prime;
        for (auto v : comps[c]) {
          for (std::size_t j = jp + 1; j < last(); ++j) {
            expect("lemma-d", (*c_[j + 1])[v] == (*c_[j])[v], v, j,
                   [] { return std::string("configuration still changes after j' + 1"); });
          }
          for (std::size_t j = jp; j <= last(); ++j) {
            const bool out = in_.derived.readout((*c_[j])[v]);
            expect("lemma-e", out == expected_out[v], v, j, [&] {
              return "derived output " + std::to_string(out) + " != halting output " +
                     std::to_string(expected_out[v]);
            });
          }
        }
      }
      report_.components.push_back(summary);
    }

    const auto& src_layer = in_.source.base.layer;
    for (std::size_t j = 0; j <= last(); ++j) {
      for (std::size_t v = 0; v < g_.size(); ++v) {
        const bool a = aligned(v, j);
        if (behind(v, j)) {
          expect("lemma-a", a, v, j, [] { return std::string("behind but not aligned"); });
        }
        const bool advancing = j < last() && in_.converging.events[j][v].advancing;
        if (!a && !advancing) continue;
        Multiset advertised;
        for (auto u : g_.neighbours(v)) advertised.add(kappa_m(u, j));
        const auto next = src_layer.combine(kappa_c(v, j), src_layer.aggregate(advertised));
        const auto* target = halting(phi(v, j) + 1, v);
        expect("lemma-f", target && next == *target, v, j, [&] {
          return "CMB(current, advertised) = " + next.str() +
                 (target ? " != H_" + std::to_string(phi(v, j) + 1) + " = " + target->str()
                         : std::string(" beyond the halting run"));
        });
      }
    }
  }

 private:
  RationalVector block(std::size_t v, std::size_t j, std::size_t offset, std::size_t len) const {
    const auto& x = (*c_[j])[v];
    if (x.dim() != at_.dim()) throw std::invalid_argument("converging state has wrong dimension");
    return x.slice(offset, len);
  }

  const Correspondence& phi_;
  const VerificationInput& in_;
  CoherenceReport& report_;
  const LabelledGraph& g_;
  std::size_t d_;
  ConfigLayout at_;
  std::vector<const State*> c_;
  std::vector<State> h_;
};

bool well_formed(const VerificationInput& in, CoherenceReport& report) {
  const auto dim = ConfigLayout{in.source.dim()}.dim();
  const auto& c = in.converging;
  bool ok = !c.states.empty() && c.graph.same_structure(in.halting.graph);
  for (const auto& s : c.states) {
    ok = ok && s.size() == c.graph.size();
    for (const auto& x : s) ok = ok && x.dim() == dim;
  }
  ok = ok && c.events.size() + 1 >= converging_states(c).size();
  report.record("trace", ok, std::nullopt, std::nullopt,
                "converging trace does not match the model, graph or event count");
  return ok;
}

}  // namespace

Correspondence extract_correspondence(const RunTrace& converging) {
  if (!converging.has_events()) {
    throw std::invalid_argument("converging trace has no protocol events; record it with events");
  }
  const auto rows = converging_states(converging).size();
  if (converging.events.size() + 1 < rows) throw std::invalid_argument("trace events have gaps");
  Correspondence c;
  c.phi.emplace_back(converging.graph.size(), 0);
  for (std::size_t j = 0; j + 1 < rows; ++j) {
    auto next = c.phi.back();
    for (std::size_t v = 0; v < next.size(); ++v) next[v] += converging.events[j][v].advancing ? 1 : 0;
    c.phi.push_back(std::move(next));
  }
  return c;
}

void check_coherence(const Correspondence& phi, const VerificationInput& in, CoherenceReport& report) {
  Checker(phi, in, report).coherence();
}

void check_lemmas(const Correspondence& phi, const VerificationInput& in, CoherenceReport& report) {
  Checker(phi, in, report).lemmas();
}

CoherenceReport verify_trace(const HaltingRGNN& source, const RGNN& derived,
                             const RunTrace& converging, std::size_t max_steps) {
  const auto halting = run_halting(source, converging.graph, max_steps);
  CoherenceReport report;
  report.halting_k = halting.k;
  report.converging_steps = converging.steps();
  const VerificationInput in{source, derived, converging, halting.trace};
  if (!well_formed(in, report)) return report;
  const auto phi = extract_correspondence(converging);
  check_coherence(phi, in, report);
  check_lemmas(phi, in, report);
  return report;
}

CoherenceReport verify_run(const HaltingRGNN& source, const RGNN& derived, const LabelledGraph& g,
                           std::size_t max_steps) {
  RunTrace trace;
  bool converged = true;
  try {
    trace = run_converging(derived, g, RunOptions{max_steps, true}).trace;
  } catch (const BudgetExhausted& e) {
    trace = e.trace();
    converged = false;
  }
  auto report = verify_trace(source, derived, trace, max_steps);
  report.record("lemma-d", converged, std::nullopt, std::nullopt,
                "derived run reached no state fixed point within " + std::to_string(max_steps) +
                    " steps");
  return report;
}

nlohmann::json report_to_json(const CoherenceReport& report, const LabelledGraph& g) {
  nlohmann::json j;
  j["ok"] = report.ok();
  j["haltingK"] = report.halting_k ? nlohmann::json(*report.halting_k) : nlohmann::json(nullptr);
  j["convergingSteps"] = report.converging_steps;
  j["maxGap"] = report.max_gap();
  j["gapHistogram"] = report.gap_histogram;
  j["components"] = nlohmann::json::array();
  for (const auto& c : report.components) {
    j["components"].push_back(
        {{"firstVertex", g.id(c.first_vertex)},
         {"kGamma", c.k_gamma ? nlohmann::json(*c.k_gamma) : nlohmann::json(nullptr)},
         {"jPrime", c.j_prime ? nlohmann::json(*c.j_prime) : nlohmann::json(nullptr)}});
  }
  j["checks"] = nlohmann::json::object();
  for (const auto& [name, count] : report.evaluated) {
    const auto it = report.failed.find(name);
    j["checks"][name] = {{"evaluated", count}, {"failed", it == report.failed.end() ? 0 : it->second}};
  }
  j["failures"] = nlohmann::json::array();
  for (const auto& f : report.failures) {
    j["failures"].push_back({{"check", f.check},
                             {"vertex", f.vertex ? nlohmann::json(g.id(*f.vertex)) : nlohmann::json(nullptr)},
                             {"step", f.step ? nlohmann::json(*f.step) : nlohmann::json(nullptr)},
                             {"detail", f.detail}});
  }
  return j;
}

}  // namespace rgnn
