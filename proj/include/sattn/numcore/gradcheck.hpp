#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sattn/numcore/tensor.hpp"

namespace sattn::num {

struct GradCheckTarget {
  std::string name;
  Tensor* value;          // perturbed in place, restored afterwards
  const Tensor* analytic;  // same shape as *value
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t entries_checked = 0;
  std::string worst_name;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  bool passed = true;
};

// |a - n| / max(|a|, |n|, 1e-8)
double relative_error(double analytic, double numeric) noexcept;

// Compares analytic gradients against central differences
// (f(p + eps) - f(p - eps)) / (2 eps). With `samples` set, that many entries
// are drawn uniformly (with replacement) across all targets using `seed`;
// otherwise every entry is checked. Throws NumericalError when f is not
// finite.
GradCheckReport finite_difference_check(const std::function<double()>& f,
                                        const std::vector<GradCheckTarget>& targets,
                                        double eps, double tolerance,
                                        std::optional<std::size_t> samples = std::nullopt,
                                        std::uint64_t seed = 0);

}  // namespace sattn::num
