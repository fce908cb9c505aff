#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sattn/numcore/tensor.hpp"

namespace sattn::training {

struct ClipResult {
  double norm = 0.0;    // global norm before clipping
  double factor = 1.0;  // applied scale, <= 1
};

// Scales every gradient by max_norm / norm when the global L2 norm exceeds
// max_norm. names, when given, label tensors in the non-finite error.
ClipResult clip_global_norm(std::vector<num::Tensor>& grads, double max_norm,
                            const std::vector<std::string>& names = {});

struct AdamOptions {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<num::Tensor> m;
  std::vector<num::Tensor> v;
  std::uint64_t step = 0;

  // Zero moments shaped like params.
  static AdamState zeros_like(const std::vector<const num::Tensor*>& params);
};

// One bias-corrected Adam update; increments state.step first.
void adam_step(const std::vector<num::Tensor*>& params, const std::vector<num::Tensor>& grads,
               AdamState& state, const AdamOptions& options);

}  // namespace sattn::training
