#pragma once

#include <filesystem>
#include <iosfwd>

#include "rgnn/semantics.hpp"

namespace rgnn {

// Trace file: JSON lines, one per step,
//   {"step":i,"features":{"v1":["0","1/2"],...},"events":{...}}
// and a final summary line
//   {"certificate":...,"k":...,"kGamma":{...}}
// kGamma is keyed by the first vertex id of each connected component.

void write_trace(std::ostream& out, const RunTrace& trace);
void save_trace(const RunTrace& trace, const std::filesystem::path& path);

/// Reads a trace recorded on `graph`. Throws ParseError on malformed input.
RunTrace read_trace(std::istream& in, const LabelledGraph& graph);
RunTrace load_trace(const std::filesystem::path& path, const LabelledGraph& graph);

nlohmann::json event_to_json(const ProtocolEvent& e);
ProtocolEvent event_from_json(const nlohmann::json& j);

}  // namespace rgnn
