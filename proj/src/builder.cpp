#include "rgnn/builder.hpp"

#include <algorithm>
#include <stdexcept>

namespace rgnn {

LinearExpr::LinearExpr(Term t, Rational c) {
  if (!c.is_zero()) coeffs.emplace(t, std::move(c));
}

LinearExpr& LinearExpr::operator+=(const LinearExpr& rhs) {
  for (const auto& [t, c] : rhs.coeffs) {
    auto& slot = coeffs[t];
    slot += c;
    if (slot.is_zero()) coeffs.erase(t);
  }
  constant += rhs.constant;
  return *this;
}

LinearExpr& LinearExpr::operator-=(const LinearExpr& rhs) { return *this += -rhs; }

LinearExpr& LinearExpr::operator*=(const Rational& k) {
  if (k.is_zero()) {
    coeffs.clear();
    constant = 0;
    return *this;
  }
  for (auto& [t, c] : coeffs) c *= k;
  constant *= k;
  return *this;
}

LinearExpr NetworkBuilder::input(std::size_t i) const {
  if (i >= input_dim_) throw std::out_of_range("builder input index out of range");
  return LinearExpr(Term{Term::Kind::input, i});
}

std::vector<LinearExpr> NetworkBuilder::inputs(std::size_t offset, std::size_t count) const {
  std::vector<LinearExpr> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(input(offset + i));
  return out;
}

std::size_t NetworkBuilder::depth_of(const LinearExpr& e) const {
  std::size_t d = 0;
  for (const auto& [t, c] : e.coeffs) {
    if (t.kind == Term::Kind::relu) d = std::max(d, units_[t.index].depth);
  }
  return d;
}

LinearExpr NetworkBuilder::relu(const LinearExpr& pre) {
  if (pre.coeffs.empty()) return LinearExpr(rgnn::relu(pre.constant));
  units_.push_back(Unit{pre, depth_of(pre) + 1});
  return LinearExpr(Term{Term::Kind::relu, units_.size() - 1});
}

LinearExpr NetworkBuilder::abs(const LinearExpr& x) { return relu(x) + relu(-x); }

LinearExpr NetworkBuilder::min(const LinearExpr& a, const LinearExpr& b) {
  return a - relu(a - b);
}

std::vector<LinearExpr> NetworkBuilder::apply(const SimpleFunction& f,
                                              std::span<const LinearExpr> args) {
  if (args.size() != f.input_dim()) {
    throw std::invalid_argument("inlined network expects " + std::to_string(f.input_dim()) +
                                " arguments, got " + std::to_string(args.size()));
  }
  std::vector<LinearExpr> current(args.begin(), args.end());
  const auto& affines = f.affines();
  for (std::size_t layer = 0; layer < affines.size(); ++layer) {
    const auto& a = affines[layer];
    std::vector<LinearExpr> next;
    next.reserve(a.output_dim());
    for (std::size_t i = 0; i < a.output_dim(); ++i) {
      LinearExpr e(a.bias()[i]);
      for (std::size_t j = 0; j < a.input_dim(); ++j) {
        if (!a.rows()[i][j].is_zero()) e += current[j] * a.rows()[i][j];
      }
      next.push_back(layer + 1 < affines.size() ? relu(e) : std::move(e));
    }
    current = std::move(next);
  }
  return current;
}

SimpleFunction NetworkBuilder::compile(std::span<const LinearExpr> outputs) const {
  // Units reachable from the outputs.
  std::vector<bool> used(units_.size(), false);
  std::vector<std::size_t> stack;
  const auto visit = [&](const LinearExpr& e) {
    for (const auto& [t, c] : e.coeffs) {
      if (t.kind == Term::Kind::relu && !used[t.index]) {
        used[t.index] = true;
        stack.push_back(t.index);
      }
    }
  };
  for (const auto& e : outputs) visit(e);
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    visit(units_[u].pre);
  }
  std::size_t depth = 0;
  for (std::size_t u = 0; u < units_.size(); ++u) {
    if (used[u]) depth = std::max(depth, units_[u].depth);
  }

  // Last hidden layer at which each term must still be readable.
  std::map<Term, std::size_t> needed_until;
  const auto need = [&](const LinearExpr& e, std::size_t layer) {
    for (const auto& [t, c] : e.coeffs) {
      auto& slot = needed_until[t];
      slot = std::max(slot, layer);
    }
  };
  for (const auto& e : outputs) need(e, depth);
  for (std::size_t u = 0; u < units_.size(); ++u) {
    if (used[u]) need(units_[u].pre, units_[u].depth - 1);
  }

  // How a term reads off the previous layer: list of (channel, coefficient).
  using Reading = std::vector<std::pair<std::size_t, Rational>>;
  std::map<Term, Reading> reading;
  for (std::size_t i = 0; i < input_dim_; ++i) {
    reading[Term{Term::Kind::input, i}] = Reading{{i, Rational(1)}};
  }
  std::size_t width = input_dim_;

  const auto row_for = [&](const LinearExpr& e, RationalVector& row, Rational& bias) {
    bias = e.constant;
    for (const auto& [t, c] : e.coeffs) {
      auto it = reading.find(t);
      if (it == reading.end()) throw std::logic_error("builder term not available at layer");
      for (const auto& [channel, k] : it->second) row[channel] += c * k;
    }
  };

  std::vector<Affine> affines;
  for (std::size_t layer = 1; layer <= depth; ++layer) {
    std::vector<RationalVector> rows;
    std::vector<Rational> bias_values;
    std::map<Term, Reading> next_reading;
    const auto add_channel = [&](const LinearExpr& pre) {
      RationalVector row(width);
      Rational b;
      row_for(pre, row, b);
      rows.push_back(std::move(row));
      bias_values.push_back(std::move(b));
      return rows.size() - 1;
    };
    for (std::size_t i = 0; i < input_dim_; ++i) {
      const Term t{Term::Kind::input, i};
      auto it = needed_until.find(t);
      if (it == needed_until.end() || it->second < layer) continue;
      const auto pos = add_channel(LinearExpr(t));
      const auto neg = add_channel(-LinearExpr(t));
      next_reading[t] = Reading{{pos, Rational(1)}, {neg, Rational(-1)}};
    }
    for (std::size_t u = 0; u < units_.size(); ++u) {
      if (!used[u]) continue;
      const Term t{Term::Kind::relu, u};
      if (units_[u].depth == layer) {
        next_reading[t] = Reading{{add_channel(units_[u].pre), Rational(1)}};
      } else if (units_[u].depth < layer && needed_until[t] >= layer) {
        next_reading[t] = Reading{{add_channel(LinearExpr(t)), Rational(1)}};
      }
    }
    affines.emplace_back(width, std::move(rows), RationalVector(std::move(bias_values)));
    reading = std::move(next_reading);
    width = affines.back().output_dim();
  }

  std::vector<RationalVector> rows;
  std::vector<Rational> bias_values;
  for (const auto& e : outputs) {
    RationalVector row(width);
    Rational b;
    row_for(e, row, b);
    rows.push_back(std::move(row));
    bias_values.push_back(std::move(b));
  }
  affines.emplace_back(width, std::move(rows), RationalVector(std::move(bias_values)));
  return SimpleFunction(std::move(affines));
}

}  // namespace rgnn
