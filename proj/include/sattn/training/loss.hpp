#pragma once

#include <cstddef>

#include "sattn/model/layers.hpp"
#include "sattn/model/params.hpp"
#include "sattn/numcore/ops.hpp"
#include "sattn/stgraph/stgraph.hpp"

namespace sattn::training {

// -log N(target | mean, sigma, rho) for one bivariate normal. rho is clamped to
// +-kRhoLimit first; |rho| >= 1 after clamping (NaN) raises NumericalError.
double bivariate_nll(const model::GaussianParams2D& g, data::Vec2 target);

// Sum over rows of the bivariate NLL. mean, sigma and target are N x 2, rho is
// N x 1. rho is clamped inside, with zero gradient beyond the limit.
num::Var bivariate_nll(num::Var mean, num::Var sigma, num::Var rho, const num::Tensor& target);

struct SequenceLoss {
  num::Var sum;            // 1 x 1; invalid when count == 0
  std::size_t count = 0;   // contributing (node, step) terms
};

// Teacher-forced loss of one window. The output at step t is scored against
// the true position at t + 1 for every node present at both, over the
// predicted span t + 1 in [observed, steps).
SequenceLoss sequence_loss(const graph::STGraphSequence& sequence, const model::BoundParams& params,
                           model::Mode mode, std::size_t observed);

}  // namespace sattn::training
