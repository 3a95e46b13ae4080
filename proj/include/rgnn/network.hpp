#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "rgnn/vector.hpp"

namespace rgnn {

/// x -> W x + b over rationals.
class Affine {
 public:
  Affine() = default;
  Affine(std::size_t input_dim, std::vector<RationalVector> rows, RationalVector bias);

  static Affine identity(std::size_t dim);
  /// Zero matrix with the given bias (a constant map).
  static Affine constant(std::size_t input_dim, RationalVector bias);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return rows_.size(); }
  const std::vector<RationalVector>& rows() const { return rows_; }
  const RationalVector& bias() const { return bias_; }

  RationalVector operator()(const RationalVector& x) const;

  friend bool operator==(const Affine&, const Affine&) = default;

 private:
  std::size_t input_dim_ = 0;
  std::vector<RationalVector> rows_;
  RationalVector bias_;
};

/// Feedforward ReLU network A_l . ReLU . ... . ReLU . A_1.
///
/// Only the affine maps are stored; a ReLU sits between every consecutive
/// pair, so the alternating shape holds by construction.
class SimpleFunction {
 public:
  explicit SimpleFunction(std::vector<Affine> affines);
  explicit SimpleFunction(Affine affine) : SimpleFunction(std::vector<Affine>{std::move(affine)}) {}

  static SimpleFunction identity(std::size_t dim) { return SimpleFunction(Affine::identity(dim)); }

  std::size_t input_dim() const { return affines_.front().input_dim(); }
  std::size_t output_dim() const { return affines_.back().output_dim(); }
  std::size_t relu_layers() const { return affines_.size() - 1; }
  const std::vector<Affine>& affines() const { return affines_; }

  /// Exact forward pass. Throws std::invalid_argument on a dimension mismatch.
  RationalVector operator()(const RationalVector& x) const;

  friend bool operator==(const SimpleFunction&, const SimpleFunction&) = default;

 private:
  std::vector<Affine> affines_;
};

/// Network with one output, read as "true iff f(x) >= 0".
class SimpleClassifier {
 public:
  explicit SimpleClassifier(SimpleFunction f);

  const SimpleFunction& function() const { return f_; }
  std::size_t input_dim() const { return f_.input_dim(); }

  Rational score(const RationalVector& x) const { return f_(x)[0]; }
  bool operator()(const RationalVector& x) const { return score(x).sign() >= 0; }

 private:
  SimpleFunction f_;
};

/// Forward pass; same as f(x).
RationalVector eval_simple(const SimpleFunction& f, const RationalVector& x);
bool classify(const SimpleClassifier& c, const RationalVector& x);

// Network JSON: {"layers":[{"affine":{"matrix":[["1","0"]],"bias":["0"]}},"relu",...]}
nlohmann::json network_to_json(const SimpleFunction& f);
SimpleFunction network_from_json(const nlohmann::json& j);

/// True when `j` is a well-formed network made only of affine maps and ReLUs.
bool is_network_json(const nlohmann::json& j);

namespace gadgets {

/// |z| = ReLU(z) + ReLU(-z), scalar.
SimpleFunction abs();
/// min(x, 1) = x - ReLU(x - 1), scalar.
SimpleFunction min_one();

}  // namespace gadgets

}  // namespace rgnn
