#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>

#include <json.hpp>

#include "rgnn/model.hpp"

namespace rgnn {

/// Named host callbacks that model files may refer to as "external:<name>".
class ExternalRegistry {
 public:
  using Map = std::function<RationalVector(const RationalVector&)>;
  using Score = std::function<Rational(const RationalVector&)>;

  /// Registry with every callback used by the gallery.
  static const ExternalRegistry& builtin();

  void add_aggregator(const std::string& name, Aggregator fn) { aggregators_[name] = std::move(fn); }
  void add_combiner(const std::string& name, Combiner fn) { combiners_[name] = std::move(fn); }
  void add_map(const std::string& name, Map fn) { maps_[name] = std::move(fn); }
  void add_score(const std::string& name, Score fn) { scores_[name] = std::move(fn); }

  /// Lookups throw ParseError for unknown names.
  const Aggregator& aggregator(const std::string& name) const;
  const Combiner& combiner(const std::string& name) const;
  const Map& map(const std::string& name) const;
  const Score& score(const std::string& name) const;

 private:
  std::map<std::string, Aggregator> aggregators_;
  std::map<std::string, Combiner> combiners_;
  std::map<std::string, Map> maps_;
  std::map<std::string, Score> scores_;
};

// Model JSON:
//   {"type":"rgnn","dim":d,"labelDim":p,"init":F,"layer":L,"readout":C}
//   {"type":"halting-rgnn",...,"halt":C}
// F and C are network JSON or {"external":name,"inputDim":..,"outputDim":..};
// L is {"aggregation":"sum","combination":network} or
// {"aggregation":"external:a","combination":"external:c"}.
// Compiled models carry "provenance":{construction,variant,bound,sourceHash}.
// Compiled models with host callbacks are stored as
//   {"type":..,"derived":{construction,variant,bound,sourceHash,source}}
// and rebuilt from the source on load.

nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& j,
                      const ExternalRegistry& registry = ExternalRegistry::builtin());

/// Two-space indented JSON plus trailing newline.
std::string model_text(const Model& model);
Model load_model(const std::filesystem::path& path,
                 const ExternalRegistry& registry = ExternalRegistry::builtin());
void save_model(const Model& model, const std::filesystem::path& path);

RGNN load_rgnn(const std::filesystem::path& path);
HaltingRGNN load_halting(const std::filesystem::path& path);

/// FNV-1a 64-bit of the compact model JSON, as 16 hex digits.
std::string model_hash(const Model& model);

/// Fills `source` and `source_hash` when the model can be serialised.
void try_attach_source(Provenance& p, const Model& source);

struct SimplicityReport {
  bool simple = true;
  std::string reason;
};

/// Structural check on a serialised model: sum aggregation, and networks of
/// affine maps and ReLUs for the combination, readout and halting classifier.
SimplicityReport check_simple(const nlohmann::json& model_json);
SimplicityReport check_simple(const Model& model);

const RGNN& base_of(const Model& model);

}  // namespace rgnn
