#include "rgnn/trace_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace rgnn {

nlohmann::json event_to_json(const ProtocolEvent& e) {
  return {{"advancing", e.advancing}, {"behind", e.behind}, {"aligned", e.aligned},
          {"eager", e.eager}};
}

ProtocolEvent event_from_json(const nlohmann::json& j) {
  try {
    return ProtocolEvent{j.at("advancing").get<bool>(), j.at("behind").get<bool>(),
                         j.at("aligned").get<bool>(), j.at("eager").get<bool>()};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed event record: ") + e.what());
  }
}

void write_trace(std::ostream& out, const RunTrace& trace) {
  const auto& g = trace.graph;
  for (std::size_t i = 0; i < trace.steps(); ++i) {
    nlohmann::json line;
    line["step"] = i;
    line["features"] = nlohmann::json::object();
    for (std::size_t v = 0; v < g.size(); ++v) line["features"][g.id(v)] = to_json(trace.states[i][v]);
    if (i < trace.events.size()) {
      line["events"] = nlohmann::json::object();
      for (std::size_t v = 0; v < g.size(); ++v) {
        line["events"][g.id(v)] = event_to_json(trace.events[i][v]);
      }
    }
    out << line.dump() << '\n';
  }
  nlohmann::json summary;
  summary["certificate"] = std::string(to_string(trace.certificate));
  summary["k"] = trace.k ? nlohmann::json(*trace.k) : nlohmann::json(nullptr);
  summary["kGamma"] = nlohmann::json::object();
  const auto comps = g.components();
  for (std::size_t c = 0; c < trace.k_gamma.size() && c < comps.size(); ++c) {
    if (trace.k_gamma[c]) summary["kGamma"][g.id(comps[c].front())] = *trace.k_gamma[c];
  }
  out << summary.dump() << '\n';
}

void save_trace(const RunTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_trace(out, trace);
}

RunTrace read_trace(std::istream& in, const LabelledGraph& graph) {
  RunTrace trace;
  trace.graph = graph;
  trace.k_gamma.assign(graph.component_count(), std::nullopt);
  std::string text;
  bool summary_seen = false;
  const auto per_vertex = [&](const nlohmann::json& obj, auto&& convert) {
    using T = decltype(convert(obj));
    if (!obj.is_object()) throw ParseError("expected an object keyed by vertex id");
    std::vector<T> row;
    row.reserve(graph.size());
    for (std::size_t v = 0; v < graph.size(); ++v) {
      auto it = obj.find(graph.id(v));
      if (it == obj.end()) throw ParseError("trace line misses vertex '" + graph.id(v) + "'");
      row.push_back(convert(*it));
    }
    if (obj.size() != graph.size()) throw ParseError("trace line mentions unknown vertices");
    return row;
  };
  while (std::getline(in, text)) {
    if (text.empty()) continue;
    if (summary_seen) throw ParseError("trace continues after its summary line");
    nlohmann::json line;
    try {
      line = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("trace line is not JSON: ") + e.what());
    }
    if (line.contains("step")) {
      if (line["step"].get<std::size_t>() != trace.steps()) throw ParseError("trace steps out of order");
      trace.states.push_back(per_vertex(line.at("features"), vector_from_json));
      if (line.contains("events")) {
        if (trace.events.size() != trace.steps() - 1) throw ParseError("trace events have gaps");
        trace.events.push_back(per_vertex(line["events"], event_from_json));
      }
      continue;
    }
    if (!line.contains("certificate")) throw ParseError("unrecognised trace line");
    summary_seen = true;
    trace.certificate = certificate_from_string(line["certificate"].get<std::string>());
    if (line.contains("k") && !line["k"].is_null()) trace.k = line["k"].get<std::size_t>();
    if (line.contains("kGamma")) {
      for (const auto& [id, kg] : line["kGamma"].items()) {
        trace.k_gamma.at(graph.component_of()[graph.require_index(id)]) = kg.get<std::size_t>();
      }
    }
  }
  if (!summary_seen) throw ParseError("trace has no summary line");
  return trace;
}

RunTrace load_trace(const std::filesystem::path& path, const LabelledGraph& graph) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trace file " + path.string());
  return read_trace(in, graph);
}

}  // namespace rgnn
