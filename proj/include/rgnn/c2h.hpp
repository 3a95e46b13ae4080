#pragma once

#include "rgnn/model.hpp"

namespace rgnn {

/// Halting model of dimension 2d that stacks the current state on the
/// previous one and halts once the two agree.
///
/// In'(x) = In(x) | (In(x) + 1), L'(y | y') = L(y) | y, halt score
/// -||y - y'||_1 and Out'(y | y') = Out(y). The aggregation keeps the source
/// aggregation on the first block as a callback. Throws std::invalid_argument
/// when d = 0.
HaltingRGNN to_halting(const RGNN& source);

/// Same construction as a simple model: sum aggregation over R^{2d}, one
/// network for the combination and networks for halting and readout.
/// Throws NotSimpleInput unless the source layer and readout are simple.
HaltingRGNN to_halting_simple(const RGNN& source);

}  // namespace rgnn
