#include "rgnn/network.hpp"

#include <stdexcept>
#include <string>

namespace rgnn {

Affine::Affine(std::size_t input_dim, std::vector<RationalVector> rows, RationalVector bias)
    : input_dim_(input_dim), rows_(std::move(rows)), bias_(std::move(bias)) {
  if (bias_.dim() != rows_.size()) throw std::invalid_argument("affine bias length != rows");
  for (const auto& r : rows_) {
    if (r.dim() != input_dim_) throw std::invalid_argument("affine row length != input dim");
  }
}

Affine Affine::identity(std::size_t dim) {
  std::vector<RationalVector> rows(dim, RationalVector(dim));
  for (std::size_t i = 0; i < dim; ++i) rows[i][i] = 1;
  return Affine(dim, std::move(rows), RationalVector(dim));
}

Affine Affine::constant(std::size_t input_dim, RationalVector bias) {
  std::vector<RationalVector> rows(bias.dim(), RationalVector(input_dim));
  return Affine(input_dim, std::move(rows), std::move(bias));
}

RationalVector Affine::operator()(const RationalVector& x) const {
  if (x.dim() != input_dim_) {
    throw std::invalid_argument("affine input has dimension " + std::to_string(x.dim()) +
                                ", expected " + std::to_string(input_dim_));
  }
  RationalVector y = bias_;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& row = rows_[i];
    for (std::size_t j = 0; j < input_dim_; ++j) {
      if (row[j].is_zero() || x[j].is_zero()) continue;
      y[i] += row[j] * x[j];
    }
  }
  return y;
}

SimpleFunction::SimpleFunction(std::vector<Affine> affines) : affines_(std::move(affines)) {
  if (affines_.empty()) throw std::invalid_argument("a network needs at least one affine map");
  for (std::size_t i = 1; i < affines_.size(); ++i) {
    if (affines_[i].input_dim() != affines_[i - 1].output_dim()) {
      throw std::invalid_argument("network layer " + std::to_string(i) +
                                  " does not chain with the previous one");
    }
  }
}

RationalVector SimpleFunction::operator()(const RationalVector& x) const {
  RationalVector y = affines_.front()(x);
  for (std::size_t i = 1; i < affines_.size(); ++i) {
    for (auto& c : y) {
      if (c.sign() < 0) c = 0;
    }
    y = affines_[i](y);
  }
  return y;
}

SimpleClassifier::SimpleClassifier(SimpleFunction f) : f_(std::move(f)) {
  if (f_.output_dim() != 1) throw std::invalid_argument("a classifier network has one output");
}

RationalVector eval_simple(const SimpleFunction& f, const RationalVector& x) { return f(x); }

bool classify(const SimpleClassifier& c, const RationalVector& x) { return c(x); }

nlohmann::json network_to_json(const SimpleFunction& f) {
  auto layers = nlohmann::json::array();
  for (std::size_t i = 0; i < f.affines().size(); ++i) {
    if (i) layers.push_back("relu");
    const auto& a = f.affines()[i];
    nlohmann::json aj;
    aj["matrix"] = nlohmann::json::array();
    for (const auto& row : a.rows()) aj["matrix"].push_back(to_json(row));
    aj["bias"] = to_json(a.bias());
    if (a.rows().empty()) aj["inputDim"] = a.input_dim();
    layers.push_back({{"affine", aj}});
  }
  return {{"layers", layers}};
}

namespace {

Affine affine_from_json(const nlohmann::json& aj) {
  if (!aj.is_object() || !aj.contains("matrix") || !aj.contains("bias")) {
    throw ParseError("affine layers need 'matrix' and 'bias'");
  }
  std::vector<RationalVector> rows;
  for (const auto& rj : aj["matrix"]) rows.push_back(vector_from_json(rj));
  std::size_t in = rows.empty() ? aj.value("inputDim", std::size_t{0}) : rows.front().dim();
  try {
    return Affine(in, std::move(rows), vector_from_json(aj["bias"]));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

}  // namespace

SimpleFunction network_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("layers") || !j["layers"].is_array()) {
    throw ParseError("network JSON needs a 'layers' array");
  }
  std::vector<Affine> affines;
  bool expect_affine = true;
  for (const auto& lj : j["layers"]) {
    if (expect_affine) {
      if (!lj.is_object() || !lj.contains("affine")) {
        throw ParseError("expected an affine layer, got " + lj.dump());
      }
      affines.push_back(affine_from_json(lj["affine"]));
    } else if (lj != "relu") {
      throw ParseError("expected \"relu\" between affine layers, got " + lj.dump());
    }
    expect_affine = !expect_affine;
  }
  if (affines.empty() || expect_affine) {
    throw ParseError("a network must start and end with an affine layer");
  }
  try {
    return SimpleFunction(std::move(affines));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

bool is_network_json(const nlohmann::json& j) {
  try {
    network_from_json(j);
  } catch (const ParseError&) {
    return false;
  }
  return true;
}

namespace gadgets {

SimpleFunction abs() {
  Affine split(1, {RationalVector{1}, RationalVector{-1}}, RationalVector{0, 0});
  Affine merge(2, {RationalVector{1, 1}}, RationalVector{0});
  return SimpleFunction({split, merge});
}

SimpleFunction min_one() {
  Affine split(1, {RationalVector{1}, RationalVector{-1}, RationalVector{1}},
               RationalVector{0, 0, -1});
  // x = ReLU(x) - ReLU(-x); then subtract ReLU(x - 1).
  Affine merge(3, {RationalVector{1, -1, -1}}, RationalVector{0});
  return SimpleFunction({split, merge});
}

}  // namespace gadgets

}  // namespace rgnn
