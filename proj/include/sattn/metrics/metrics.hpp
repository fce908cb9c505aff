#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sattn/data/trajectory.hpp"
#include "sattn/data/windows.hpp"

namespace sattn::metrics {

using data::PedId;
using data::Vec2;

// ped -> step -> position
using Tracks = std::map<PedId, std::map<std::size_t, Vec2>>;

// Mean Euclidean distance over predicted points that have a true position.
// Throws DataError("nothing to evaluate") when no point matches.
double ade(const Tracks& predicted, const Tracks& truth);

// Mean over pedestrians of the distance at final_step; pedestrians without a
// prediction or truth there are skipped. Throws DataError when none remain.
double fde(const Tracks& predicted, const Tracks& truth, std::size_t final_step);

// Running sums behind ADE/FDE so that windows and scenes can be pooled with
// per-term weighting.
struct ErrorSums {
  double displacement_sum = 0.0;
  std::size_t displacement_terms = 0;
  double final_sum = 0.0;
  std::size_t final_terms = 0;
  std::size_t pedestrians = 0;
  std::size_t windows = 0;

  void add_window(const Tracks& predicted, const Tracks& truth, std::size_t final_step);
  void merge(const ErrorSums& other);
  double ade() const;  // throws when empty
  double fde() const;
};

// Truth of the predicted span [window.observed, window.total).
Tracks future_truth(const data::SequenceWindow& window);

struct SceneReport {
  std::string scene;
  double ade_m = 0.0;
  double fde_m = 0.0;
  std::size_t n_peds = 0;
  std::size_t n_windows = 0;
};

struct EvalReport {
  std::vector<SceneReport> scenes;
  SceneReport aggregate;  // scene = "all"
};

using Predictor = std::function<Tracks(const data::SequenceWindow&)>;

// Scenes are reported in input order; the aggregate pools every term.
EvalReport evaluate(const std::vector<std::pair<std::string, std::vector<data::SequenceWindow>>>& scenes,
                    const Predictor& predict);

// scene,ade_m,fde_m,n_peds,n_windows with the aggregate row last.
void write_report(std::ostream& out, const EvalReport& report);

}  // namespace sattn::metrics
