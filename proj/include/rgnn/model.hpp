#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "rgnn/layer.hpp"
#include "rgnn/network.hpp"

namespace rgnn {

/// Vector function R^p -> R^q: a network or a named host callback.
class VectorMap {
 public:
  struct External {
    std::string name;
    std::size_t input_dim;
    std::size_t output_dim;
    std::function<RationalVector(const RationalVector&)> fn;
  };

  VectorMap(SimpleFunction f) : impl_(std::move(f)) {}  // NOLINT: implicit by intent
  VectorMap(External e);                                  // NOLINT

  bool is_simple() const { return std::holds_alternative<SimpleFunction>(impl_); }
  const SimpleFunction& network() const { return std::get<SimpleFunction>(impl_); }
  const External& external() const { return std::get<External>(impl_); }

  std::size_t input_dim() const;
  std::size_t output_dim() const;

  RationalVector operator()(const RationalVector& x) const;

 private:
  std::variant<SimpleFunction, External> impl_;
};

/// Boolean classifier on R^d read off a score: true iff score >= 0.
class Classifier {
 public:
  struct External {
    std::string name;
    std::size_t input_dim;
    std::function<Rational(const RationalVector&)> score;
  };

  Classifier(SimpleClassifier c) : impl_(std::move(c)) {}  // NOLINT: implicit by intent
  Classifier(External e);                                   // NOLINT

  bool is_simple() const { return std::holds_alternative<SimpleClassifier>(impl_); }
  const SimpleClassifier& simple() const { return std::get<SimpleClassifier>(impl_); }
  const External& external() const { return std::get<External>(impl_); }

  std::size_t input_dim() const;
  Rational score(const RationalVector& x) const;
  bool operator()(const RationalVector& x) const { return score(x).sign() >= 0; }

 private:
  std::variant<SimpleClassifier, External> impl_;
};

/// Where a compiled model came from.
struct Provenance {
  std::string construction;  // "c2h" or "h2c"
  std::string variant;       // "general" or "simple"
  std::optional<Rational> bound;
  std::string source_hash;
  /// Source model JSON; general variants are rebuilt from it on load.
  nlohmann::json source;
};

/// Recurrent GNN (In, L, Out) of dimension d over labels of dimension p.
struct RGNN {
  VectorMap init;
  ACLayer layer;
  Classifier readout;
  std::optional<Provenance> provenance;

  std::size_t dim() const { return layer.input_dim(); }
  std::size_t label_dim() const { return init.input_dim(); }

  /// Layer, readout simple (initialisation is unconstrained).
  bool is_simple() const { return layer.is_simple() && readout.is_simple(); }

  /// Throws std::invalid_argument unless the parts chain: In: p -> d,
  /// L: d -> d, Out: d -> B.
  void validate() const;
};

/// Halting RGNN (R, Hlt).
struct HaltingRGNN {
  RGNN base;
  Classifier halt;

  std::size_t dim() const { return base.dim(); }
  std::size_t label_dim() const { return base.label_dim(); }
  bool is_simple() const { return base.is_simple() && halt.is_simple(); }
  void validate() const;
};

using Model = std::variant<RGNN, HaltingRGNN>;

/// Raised when a simplicity-preserving construction gets a non-simple input.
class NotSimpleInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace rgnn
