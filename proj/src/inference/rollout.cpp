#include "sattn/inference/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "sattn/error.hpp"
#include "sattn/stgraph/stgraph.hpp"

namespace sattn::inference {

Vec2 sample_bivariate(const model::GaussianParams2D& g, CounterRng& rng) {
  const auto [z1, z2] = rng.normal_pair();
  const double rho = g.rho;
  return {g.mean.x + g.sigma.x * z1,
          g.mean.y + g.sigma.y * (rho * z1 + std::sqrt(1.0 - rho * rho) * z2)};
}

Forecast rollout(const data::SequenceWindow& window, const model::ModelParams& params,
                 model::Mode mode, const RolloutOptions& options) {
  const std::size_t observed = window.observed;
  if (observed == 0 || observed > window.frames.size()) {
    throw DataError("rollout: window " + window.id() + " has no observation span");
  }
  const graph::STGraphSequence truth = graph::build_sequence(window);
  if (truth.steps[observed - 1].nodes.empty()) {
    throw DataError("rollout: nobody present at the last observed step of " + window.id());
  }

  Forecast forecast;
  forecast.window_id = window.id();
  forecast.pedestrians = truth.steps[observed - 1].nodes;

  num::Tape tape(false);
  const model::BoundParams bound = model::bind(tape, params);
  CounterRng rng(derive_seed(options.seed, "sample"));
  model::HiddenState state;

  std::map<PedId, Vec2> previous;
  graph::STGraphStep step;
  for (std::size_t t = 0; t + 1 < window.total; ++t) {
    if (t < observed) {
      step = truth.steps[t];
    } else {
      std::map<PedId, Vec2> current;
      for (const ForecastPoint& p : forecast.points) {
        if (p.t == t) current[p.ped] = p.position;
      }
      step = graph::make_step(t, current, &previous);
    }
    model::StepOutput out = model::forward_step(step, state, bound, mode);
    for (auto& record : out.attention) forecast.attention.push_back(std::move(record));
    state = std::move(out.state);

    previous.clear();
    for (std::size_t i = 0; i < step.nodes.size(); ++i) previous[step.nodes[i]] = step.positions[i];
    if (t + 1 < observed) continue;

    const std::vector<model::GaussianParams2D> gaussians = model::gaussians(out);
    for (std::size_t i = 0; i < out.nodes.size(); ++i) {
      ForecastPoint p;
      p.ped = out.nodes[i];
      p.t = t + 1;
      p.gaussian = gaussians[i];
      p.gaussian.rho = std::clamp(p.gaussian.rho, -model::kRhoLimit, model::kRhoLimit);
      p.position = options.deterministic ? p.gaussian.mean : sample_bivariate(p.gaussian, rng);
      if (!std::isfinite(p.position.x) || !std::isfinite(p.position.y)) {
        throw NumericalError("rollout: non-finite prediction for ped " + std::to_string(p.ped) +
                             " in window " + window.id());
      }
      forecast.points.push_back(p);
    }
  }
  return forecast;
}

metrics::Tracks predicted_tracks(const Forecast& forecast) {
  metrics::Tracks tracks;
  for (const ForecastPoint& p : forecast.points) tracks[p.ped][p.t] = p.position;
  return tracks;
}

void write_forecast_header(std::ostream& out) {
  out << "window_id,ped_id,t,mu_x,mu_y,sigma_x,sigma_y,rho,xhat,yhat\n";
}

void write_forecast_rows(std::ostream& out, const Forecast& forecast) {
  using data::format_number;
  for (const ForecastPoint& p : forecast.points) {
    const auto& g = p.gaussian;
    out << forecast.window_id << ',' << p.ped << ',' << p.t + 1 << ',' << format_number(g.mean.x)
        << ',' << format_number(g.mean.y) << ',' << format_number(g.sigma.x) << ','
        << format_number(g.sigma.y) << ',' << format_number(g.rho) << ','
        << format_number(p.position.x) << ',' << format_number(p.position.y) << '\n';
  }
}

void write_attention_header(std::ostream& out) { out << "window_id,ped_id,t,neighbor_id,weight\n"; }

void write_attention_rows(std::ostream& out, const std::string& window_id,
                          const std::vector<model::AttentionRecord>& records) {
  for (const auto& r : records) {
    for (std::size_t k = 0; k < r.neighbors.size(); ++k) {
      out << window_id << ',' << r.node << ',' << r.t + 1 << ',' << r.neighbors[k] << ','
          << data::format_number(r.weights[k]) << '\n';
    }
  }
}

}  // namespace sattn::inference
