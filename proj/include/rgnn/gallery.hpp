#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rgnn/graph.hpp"
#include "rgnn/model.hpp"

namespace rgnn {

class ExternalRegistry;

enum class Semantics { converging, halting, output_converging };

std::string_view to_string(Semantics s);
/// Throws ParseError for anything but "converging", "halting" or
/// "output-converging".
Semantics semantics_from_string(std::string_view s);

/// Hand-built model with a graph-algorithmic description of what it computes.
struct GalleryEntry {
  std::string name;
  std::string description;
  Model model;
  Semantics semantics;
  /// Labels the model is meant for.
  std::vector<RationalVector> palette{};
  /// Expected output per vertex.
  std::function<std::vector<bool>(const LabelledGraph&)> oracle{};
  /// Expected stopping index (converging, halting) or first stable output
  /// index (output-converging).
  std::function<std::size_t(const LabelledGraph&)> index_oracle{};
  bool simple = false;
  /// Per-step change bound for the simple protocol compilation.
  std::optional<Rational> bound{};
  bool invariant = true;
  /// Halting score takes only the values -1 and 1 along runs.
  bool range_condition = false;
};

const std::vector<GalleryEntry>& gallery_list();
/// Throws std::invalid_argument for unknown names.
const GalleryEntry& gallery_get(std::string_view name);

/// Oscillator x -> -x from x = 1. With `constant_readout` the readout is
/// always true; otherwise it reads the sign of x and the output never settles.
RGNN make_oscillator(bool constant_readout);

/// Host callbacks used by gallery models.
void register_gallery_externals(ExternalRegistry& registry);

}  // namespace rgnn
