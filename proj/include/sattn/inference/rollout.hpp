#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sattn/data/windows.hpp"
#include "sattn/metrics/metrics.hpp"
#include "sattn/model/layers.hpp"
#include "sattn/model/params.hpp"
#include "sattn/model/social_attention.hpp"
#include "sattn/rng.hpp"

namespace sattn::inference {

using data::PedId;
using data::Vec2;

// x = mu_x + sigma_x z1, y = mu_y + sigma_y (rho z1 + sqrt(1 - rho^2) z2).
Vec2 sample_bivariate(const model::GaussianParams2D& g, CounterRng& rng);

struct ForecastPoint {
  PedId ped = 0;
  std::size_t t = 0;  // window step index (0-based) of the predicted position
  model::GaussianParams2D gaussian;
  Vec2 position;      // mean in deterministic mode, a sample otherwise
};

struct Forecast {
  std::string window_id;
  std::vector<PedId> pedestrians;  // present at the last observed step
  std::vector<ForecastPoint> points;  // by t, then ped
  std::vector<model::AttentionRecord> attention;  // every step that ran, by t then node
};

struct RolloutOptions {
  bool deterministic = true;
  std::uint64_t seed = 0;  // sampling stream, used when !deterministic
};

// Runs the model on the observed steps with true features, then feeds its
// own predictions back as node and edge features for the remaining
// window.total - window.observed steps. Only pedestrians present at the last
// observed step are forecast.
Forecast rollout(const data::SequenceWindow& window, const model::ModelParams& params,
                 model::Mode mode, const RolloutOptions& options);

// Predicted positions keyed by ped and window step.
metrics::Tracks predicted_tracks(const Forecast& forecast);

// window_id,ped_id,t,mu_x,mu_y,sigma_x,sigma_y,rho,xhat,yhat with t 1-based.
void write_forecast_header(std::ostream& out);
void write_forecast_rows(std::ostream& out, const Forecast& forecast);

// window_id,ped_id,t,neighbor_id,weight with t 1-based; one row per neighbor.
void write_attention_header(std::ostream& out);
void write_attention_rows(std::ostream& out, const std::string& window_id,
                          const std::vector<model::AttentionRecord>& records);

}  // namespace sattn::inference
