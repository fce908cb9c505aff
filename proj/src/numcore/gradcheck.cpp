#include "sattn/numcore/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "sattn/error.hpp"
#include "sattn/rng.hpp"

namespace sattn::num {

double relative_error(double analytic, double numeric) noexcept {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

namespace {

double evaluate(const std::function<double()>& f, const std::string& name, std::size_t index) {
  const double v = f();
  if (!std::isfinite(v)) {
    throw NumericalError("finite_difference_check: non-finite value while perturbing " + name +
                         "[" + std::to_string(index) + "]");
  }
  return v;
}

}  // namespace

GradCheckReport finite_difference_check(const std::function<double()>& f,
                                        const std::vector<GradCheckTarget>& targets, double eps,
                                        double tolerance, std::optional<std::size_t> samples,
                                        std::uint64_t seed) {
  if (!(eps > 0.0)) throw UsageError("finite_difference_check: eps must be positive");
  for (const GradCheckTarget& t : targets) {
    if (t.value == nullptr || t.analytic == nullptr || t.value->shape() != t.analytic->shape()) {
      throw ShapeError("finite_difference_check: target " + t.name + " has mismatched gradient");
    }
  }
  evaluate(f, "(base)", 0);

  std::vector<std::pair<std::size_t, std::size_t>> entries;
  std::size_t total = 0;
  for (const GradCheckTarget& t : targets) total += t.value->size();
  if (samples.has_value()) {
    CounterRng rng(seed);
    for (std::size_t s = 0; s < *samples && total > 0; ++s) {
      std::size_t flat = static_cast<std::size_t>(rng.below(total));
      std::size_t ti = 0;
      while (flat >= targets[ti].value->size()) flat -= targets[ti++].value->size();
      entries.emplace_back(ti, flat);
    }
  } else {
    for (std::size_t ti = 0; ti < targets.size(); ++ti) {
      for (std::size_t i = 0; i < targets[ti].value->size(); ++i) entries.emplace_back(ti, i);
    }
  }

  GradCheckReport report;
  for (const auto& [ti, i] : entries) {
    const GradCheckTarget& t = targets[ti];
    double& p = (*t.value)[i];
    const double original = p;
    p = original + eps;
    const double plus = evaluate(f, t.name, i);
    p = original - eps;
    const double minus = evaluate(f, t.name, i);
    p = original;

    const double numeric = (plus - minus) / (2.0 * eps);
    const double analytic = (*t.analytic)[i];
    const double err = relative_error(analytic, numeric);
    ++report.entries_checked;
    if (report.entries_checked == 1 || err > report.max_relative_error) {
      report.max_relative_error = err;
      report.worst_name = t.name;
      report.worst_index = i;
      report.worst_analytic = analytic;
      report.worst_numeric = numeric;
    }
  }
  report.passed = report.max_relative_error < tolerance;
  return report;
}

}  // namespace sattn::num
