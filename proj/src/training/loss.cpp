#include "sattn/training/loss.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sattn/error.hpp"
#include "sattn/model/social_attention.hpp"

namespace sattn::training {

using num::Tensor;
using num::Var;

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

struct NllTerms {
  double value;
  double d_mux, d_muy, d_sx, d_sy, d_rho;
};

NllTerms nll_terms(double mux, double muy, double sx, double sy, double rho, double x, double y) {
  if (!(std::abs(rho) < 1.0)) throw NumericalError("bivariate_nll: |rho| >= 1 after clamping");
  if (!(sx > 0.0) || !(sy > 0.0)) throw NumericalError("bivariate_nll: sigma must be positive");
  const double a = (x - mux) / sx;
  const double b = (y - muy) / sy;
  const double q = 1.0 - rho * rho;
  const double z = a * a + b * b - 2.0 * rho * a * b;
  NllTerms t;
  t.value = kLog2Pi + std::log(sx) + std::log(sy) + 0.5 * std::log(q) + z / (2.0 * q);
  t.d_mux = -(a - rho * b) / (q * sx);
  t.d_muy = -(b - rho * a) / (q * sy);
  t.d_sx = 1.0 / sx - a * (a - rho * b) / (q * sx);
  t.d_sy = 1.0 / sy - b * (b - rho * a) / (q * sy);
  t.d_rho = -rho / q - a * b / q + rho * z / (q * q);
  return t;
}

}  // namespace

double bivariate_nll(const model::GaussianParams2D& g, data::Vec2 target) {
  const double rho = std::clamp(g.rho, -model::kRhoLimit, model::kRhoLimit);
  return nll_terms(g.mean.x, g.mean.y, g.sigma.x, g.sigma.y, rho, target.x, target.y).value;
}

Var bivariate_nll(Var mean, Var sigma, Var rho, const Tensor& target) {
  const std::size_t n = mean.rows();
  if (mean.cols() != 2 || sigma.rows() != n || sigma.cols() != 2 || rho.rows() != n ||
      rho.cols() != 1 || target.rows() != n || target.cols() != 2) {
    throw ShapeError("bivariate_nll: shape mismatch " + num::to_string(mean.shape()) + " vs " +
                     num::to_string(target.shape()));
  }
  const Var r = num::clamp(rho, -model::kRhoLimit, model::kRhoLimit);
  const Tensor& m = mean.value();
  const Tensor& s = sigma.value();
  const Tensor& c = r.value();
  Tensor partials({n, 5});
  // Row terms are summed in sorted order so that relabeling pedestrians
  // cannot change the total.
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const NllTerms t = nll_terms(m.at(i, 0), m.at(i, 1), s.at(i, 0), s.at(i, 1), c[i],
                                 target.at(i, 0), target.at(i, 1));
    values[i] = t.value;
    partials.at(i, 0) = t.d_mux;
    partials.at(i, 1) = t.d_muy;
    partials.at(i, 2) = t.d_sx;
    partials.at(i, 3) = t.d_sy;
    partials.at(i, 4) = t.d_rho;
  }
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (const double v : values) total += v;
  return mean.tape()->record(
      Tensor::scalar(total), {mean, sigma, r},
      [mean, sigma, r, partials = std::move(partials), n](num::Tape& tape, const Tensor& g) {
        const double scale = g[0];
        if (tape.requires_grad(mean)) {
          Tensor& gm = tape.grad_buffer(mean);
          for (std::size_t i = 0; i < n; ++i) {
            gm.at(i, 0) += scale * partials.at(i, 0);
            gm.at(i, 1) += scale * partials.at(i, 1);
          }
        }
        if (tape.requires_grad(sigma)) {
          Tensor& gs = tape.grad_buffer(sigma);
          for (std::size_t i = 0; i < n; ++i) {
            gs.at(i, 0) += scale * partials.at(i, 2);
            gs.at(i, 1) += scale * partials.at(i, 3);
          }
        }
        if (tape.requires_grad(r)) {
          Tensor& gr = tape.grad_buffer(r);
          for (std::size_t i = 0; i < n; ++i) gr[i] += scale * partials.at(i, 4);
        }
      });
}

SequenceLoss sequence_loss(const graph::STGraphSequence& sequence, const model::BoundParams& params,
                           model::Mode mode, std::size_t observed) {
  SequenceLoss loss;
  const std::size_t steps = sequence.steps.size();
  if (observed == 0 || observed >= steps) return loss;
  num::Tape& tape = *params.tape;
  model::HiddenState state;
  for (std::size_t t = 0; t + 1 < steps; ++t) {
    const graph::STGraphStep& step = sequence.steps[t];
    model::StepOutput out = model::forward_step(step, state, params, mode);
    state = std::move(out.state);
    if (t + 1 < observed) continue;

    const graph::STGraphStep& next = sequence.steps[t + 1];
    std::vector<num::RowRef> rows;
    std::vector<data::Vec2> targets;
    for (std::size_t i = 0; i < step.nodes.size(); ++i) {
      const auto k = next.node_index(step.nodes[i]);
      if (!k) continue;
      rows.push_back({{}, i});
      targets.push_back(next.positions[*k]);
    }
    if (rows.empty()) continue;
    Tensor target = Tensor::zeros(rows.size(), 2);
    for (std::size_t j = 0; j < targets.size(); ++j) {
      target.at(j, 0) = targets[j].x;
      target.at(j, 1) = targets[j].y;
    }
    auto pick = [&](Var source) {
      for (auto& ref : rows) ref.source = source;
      return num::assemble_rows(tape, rows, source.cols());
    };
    const Var mean = pick(out.gaussian.mean);
    const Var sigma = pick(out.gaussian.sigma);
    const Var rho = pick(out.gaussian.rho);
    const Var term = bivariate_nll(mean, sigma, rho, target);
    loss.sum = loss.sum.valid() ? num::add(loss.sum, term) : term;
    loss.count += rows.size();
  }
  return loss;
}

}  // namespace sattn::training
