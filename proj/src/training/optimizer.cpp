#include "sattn/training/optimizer.hpp"

#include <cmath>

#include "sattn/error.hpp"

namespace sattn::training {

ClipResult clip_global_norm(std::vector<num::Tensor>& grads, double max_norm,
                            const std::vector<std::string>& names) {
  if (!(max_norm > 0.0)) throw UsageError("clip_global_norm: max_norm must be positive");
  double squares = 0.0;
  for (std::size_t k = 0; k < grads.size(); ++k) {
    if (!grads[k].all_finite()) {
      const std::string name = k < names.size() ? names[k] : "#" + std::to_string(k);
      throw NumericalError("non-finite gradient in tensor " + name);
    }
    for (const double g : grads[k].data()) squares += g * g;
  }
  ClipResult result;
  result.norm = std::sqrt(squares);
  if (result.norm > max_norm) {
    result.factor = max_norm / result.norm;
    for (auto& g : grads) {
      for (double& x : g.data()) x *= result.factor;
    }
  }
  return result;
}

AdamState AdamState::zeros_like(const std::vector<const num::Tensor*>& params) {
  AdamState s;
  for (const num::Tensor* p : params) {
    s.m.emplace_back(p->shape());
    s.v.emplace_back(p->shape());
  }
  return s;
}

void adam_step(const std::vector<num::Tensor*>& params, const std::vector<num::Tensor>& grads,
               AdamState& state, const AdamOptions& options) {
  if (params.size() != grads.size() || params.size() != state.m.size() ||
      params.size() != state.v.size()) {
    throw ShapeError("adam_step: " + std::to_string(params.size()) + " params, " +
                     std::to_string(grads.size()) + " grads, " + std::to_string(state.m.size()) +
                     " moments");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(options.beta1, t);
  const double c2 = 1.0 - std::pow(options.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto p = params[k]->data();
    auto g = grads[k].data();
    auto m = state.m[k].data();
    auto v = state.v[k].data();
    if (g.size() != p.size() || m.size() != p.size() || v.size() != p.size()) {
      throw ShapeError("adam_step: tensor " + std::to_string(k) + " shape mismatch");
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = options.beta1 * m[i] + (1.0 - options.beta1) * g[i];
      v[i] = options.beta2 * v[i] + (1.0 - options.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p[i] -= options.learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon);
    }
  }
}

}  // namespace sattn::training
