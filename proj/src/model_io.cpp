#include "rgnn/model_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rgnn/c2h.hpp"
#include "rgnn/gallery.hpp"
#include "rgnn/h2c.hpp"

namespace rgnn {

namespace {

constexpr std::string_view external_prefix = "external:";

template <class T>
const T& lookup(const std::map<std::string, T>& table, const std::string& name, const char* what) {
  auto it = table.find(name);
  if (it == table.end()) throw ParseError(std::string("unknown external ") + what + " '" + name + "'");
  return it->second;
}

}  // namespace

const ExternalRegistry& ExternalRegistry::builtin() {
  static const ExternalRegistry registry = [] {
    ExternalRegistry r;
    register_gallery_externals(r);
    return r;
  }();
  return registry;
}

const Aggregator& ExternalRegistry::aggregator(const std::string& name) const {
  return lookup(aggregators_, name, "aggregation");
}
const Combiner& ExternalRegistry::combiner(const std::string& name) const {
  return lookup(combiners_, name, "combination");
}
const ExternalRegistry::Map& ExternalRegistry::map(const std::string& name) const {
  return lookup(maps_, name, "map");
}
const ExternalRegistry::Score& ExternalRegistry::score(const std::string& name) const {
  return lookup(scores_, name, "classifier");
}

const RGNN& base_of(const Model& model) {
  return std::visit(
      [](const auto& m) -> const RGNN& {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, RGNN>) {
          return m;
        } else {
          return m.base;
        }
      },
      model);
}

namespace {

const HaltingRGNN* halting_of(const Model& model) { return std::get_if<HaltingRGNN>(&model); }

bool has_external(const Model& model) {
  const auto& base = base_of(model);
  if (!base.init.is_simple() || !base.layer.is_simple() || !base.readout.is_simple()) return true;
  const auto* h = halting_of(model);
  return h && !h->halt.is_simple();
}

nlohmann::json map_to_json(const VectorMap& f) {
  if (f.is_simple()) return network_to_json(f.network());
  return {{"external", f.external().name},
          {"inputDim", f.external().input_dim},
          {"outputDim", f.external().output_dim}};
}

nlohmann::json classifier_to_json(const Classifier& c) {
  if (c.is_simple()) return network_to_json(c.simple().function());
  return {{"external", c.external().name}, {"inputDim", c.external().input_dim}};
}

nlohmann::json layer_to_json(const ACLayer& layer) {
  if (layer.is_simple()) {
    return {{"aggregation", "sum"}, {"combination", network_to_json(layer.combine_network())}};
  }
  return {{"aggregation", std::string(external_prefix) + layer.aggregation_name()},
          {"combination", std::string(external_prefix) + layer.combination_name()},
          {"inputDim", layer.input_dim()},
          {"outputDim", layer.output_dim()}};
}

nlohmann::json provenance_to_json(const Provenance& p) {
  return {{"construction", p.construction},
          {"variant", p.variant},
          {"bound", p.bound ? to_json(*p.bound) : nlohmann::json(nullptr)},
          {"sourceHash", p.source_hash}};
}

const char* type_of(const Model& model) {
  return halting_of(model) ? "halting-rgnn" : "rgnn";
}

std::string fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string external_name(const nlohmann::json& j, const char* field) {
  const auto text = j.at(field).get<std::string>();
  if (!text.starts_with(external_prefix)) {
    throw ParseError(std::string(field) + " must be \"sum\" or \"external:<name>\", got '" + text +
                     "'");
  }
  return text.substr(external_prefix.size());
}

VectorMap map_from_json(const nlohmann::json& j, const ExternalRegistry& registry) {
  if (j.contains("external")) {
    const auto name = j.at("external").get<std::string>();
    return VectorMap::External{name, j.at("inputDim").get<std::size_t>(),
                               j.at("outputDim").get<std::size_t>(), registry.map(name)};
  }
  return network_from_json(j);
}

Classifier classifier_from_json(const nlohmann::json& j, const ExternalRegistry& registry) {
  if (j.contains("external")) {
    const auto name = j.at("external").get<std::string>();
    return Classifier::External{name, j.at("inputDim").get<std::size_t>(), registry.score(name)};
  }
  auto f = network_from_json(j);
  if (f.output_dim() != 1) throw ParseError("classifier network must have exactly one output");
  return SimpleClassifier(std::move(f));
}

ACLayer layer_from_json(const nlohmann::json& j, const ExternalRegistry& registry) {
  const auto& aggregation = j.at("aggregation");
  if (aggregation == "sum") {
    if (j.at("combination").is_string()) {
      throw ParseError("sum aggregation needs a combination network");
    }
    return ACLayer::simple(network_from_json(j.at("combination")));
  }
  const auto agg = external_name(j, "aggregation");
  const auto cmb = external_name(j, "combination");
  return ACLayer::general(j.at("inputDim").get<std::size_t>(), j.at("outputDim").get<std::size_t>(),
                          {agg, registry.aggregator(agg)}, {cmb, registry.combiner(cmb)});
}

std::optional<Rational> bound_from_json(const nlohmann::json& j) {
  if (!j.contains("bound") || j["bound"].is_null()) return std::nullopt;
  return rational_from_json(j["bound"]);
}

Model rebuild_derived(const nlohmann::json& derived, const std::string& type,
                      const ExternalRegistry& registry) {
  const auto construction = derived.at("construction").get<std::string>();
  const auto variant = derived.at("variant").get<std::string>();
  const auto& source_json = derived.at("source");
  if (fnv1a(source_json.dump()) != derived.at("sourceHash").get<std::string>()) {
    throw ParseError("derived model source does not match its recorded hash");
  }
  const Model source = model_from_json(source_json, registry);
  if (variant != "general" && variant != "simple") throw ParseError("unknown variant '" + variant + "'");
  const bool simple = variant == "simple";
  if (construction == "c2h") {
    const auto* c = std::get_if<RGNN>(&source);
    if (!c || type != "halting-rgnn") throw ParseError("c2h derives a halting model from an RGNN");
    return simple ? to_halting_simple(*c) : to_halting(*c);
  }
  if (construction == "h2c") {
    const auto* h = std::get_if<HaltingRGNN>(&source);
    if (!h || type != "rgnn") throw ParseError("h2c derives an RGNN from a halting model");
    if (!simple) return to_converging(*h);
    const auto bound = bound_from_json(derived);
    if (!bound) throw ParseError("simple h2c model needs a bound");
    return to_converging_simple(*h, *bound);
  }
  throw ParseError("unknown construction '" + construction + "'");
}

}  // namespace

nlohmann::json model_to_json(const Model& model) {
  const auto& base = base_of(model);
  nlohmann::json j;
  j["type"] = type_of(model);
  if (base.provenance && has_external(model)) {
    const auto& p = *base.provenance;
    if (p.source.is_null()) {
      throw std::invalid_argument("compiled model uses host callbacks and its source cannot be saved");
    }
    auto derived = provenance_to_json(p);
    derived["source"] = p.source;
    j["derived"] = std::move(derived);
    return j;
  }
  j["dim"] = base.dim();
  j["labelDim"] = base.label_dim();
  j["init"] = map_to_json(base.init);
  j["layer"] = layer_to_json(base.layer);
  j["readout"] = classifier_to_json(base.readout);
  if (const auto* h = halting_of(model)) j["halt"] = classifier_to_json(h->halt);
  if (base.provenance) j["provenance"] = provenance_to_json(*base.provenance);
  return j;
}

Model model_from_json(const nlohmann::json& j, const ExternalRegistry& registry) {
  try {
    const auto type = j.at("type").get<std::string>();
    if (type != "rgnn" && type != "halting-rgnn") throw ParseError("unknown model type '" + type + "'");
    if (j.contains("derived")) return rebuild_derived(j["derived"], type, registry);

    RGNN base{map_from_json(j.at("init"), registry), layer_from_json(j.at("layer"), registry),
              classifier_from_json(j.at("readout"), registry), std::nullopt};
    if (j.contains("dim") && j["dim"].get<std::size_t>() != base.dim()) {
      throw ParseError("declared dim does not match the layer");
    }
    if (j.contains("labelDim") && j["labelDim"].get<std::size_t>() != base.label_dim()) {
      throw ParseError("declared labelDim does not match the initialisation");
    }
    if (j.contains("provenance")) {
      const auto& p = j["provenance"];
      base.provenance = Provenance{p.at("construction").get<std::string>(),
                                   p.at("variant").get<std::string>(), bound_from_json(p),
                                   p.at("sourceHash").get<std::string>(), nullptr};
    }
    try {
      if (type == "rgnn") {
        base.validate();
        return base;
      }
      HaltingRGNN h{std::move(base), classifier_from_json(j.at("halt"), registry)};
      h.validate();
      return h;
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string("inconsistent model: ") + e.what());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed model JSON: ") + e.what());
  }
}

std::string model_text(const Model& model) { return model_to_json(model).dump(2) + "\n"; }

Model load_model(const std::filesystem::path& path, const ExternalRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return model_from_json(j, registry);
}

void save_model(const Model& model, const std::filesystem::path& path) {
  const auto text = model_text(model);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

RGNN load_rgnn(const std::filesystem::path& path) {
  auto m = load_model(path);
  if (auto* r = std::get_if<RGNN>(&m)) return std::move(*r);
  throw ParseError(path.string() + " holds a halting model, expected an RGNN");
}

HaltingRGNN load_halting(const std::filesystem::path& path) {
  auto m = load_model(path);
  if (auto* h = std::get_if<HaltingRGNN>(&m)) return std::move(*h);
  throw ParseError(path.string() + " holds an RGNN, expected a halting model");
}

std::string model_hash(const Model& model) { return fnv1a(model_to_json(model).dump()); }

void try_attach_source(Provenance& p, const Model& source) {
  try {
    p.source = model_to_json(source);
    p.source_hash = fnv1a(p.source.dump());
  } catch (const std::invalid_argument&) {
    p.source = nullptr;
    p.source_hash.clear();
  }
}

SimplicityReport check_simple(const nlohmann::json& j) {
  const auto fail = [](std::string reason) { return SimplicityReport{false, std::move(reason)}; };
  if (!j.is_object()) return fail("not a model object");
  if (j.contains("derived")) return fail("model is rebuilt from host callbacks");
  if (!j.contains("layer") || !j["layer"].is_object()) return fail("missing layer");
  const auto& layer = j["layer"];
  if (layer.value("aggregation", nlohmann::json()) != "sum") return fail("aggregation is not sum");
  if (!layer.contains("combination") || !is_network_json(layer["combination"])) {
    return fail("combination is not an affine/ReLU network");
  }
  const auto one_output = [](const nlohmann::json& c) {
    return is_network_json(c) && network_from_json(c).output_dim() == 1;
  };
  if (!j.contains("readout") || !one_output(j["readout"])) {
    return fail("readout is not a single-output network");
  }
  if (j.value("type", "") == "halting-rgnn" && (!j.contains("halt") || !one_output(j["halt"]))) {
    return fail("halting classifier is not a single-output network");
  }
  return {};
}

SimplicityReport check_simple(const Model& model) {
  try {
    return check_simple(model_to_json(model));
  } catch (const std::invalid_argument& e) {
    return SimplicityReport{false, e.what()};
  }
}

}  // namespace rgnn
