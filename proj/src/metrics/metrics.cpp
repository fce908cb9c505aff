#include "sattn/metrics/metrics.hpp"

#include <cmath>
#include <ostream>

#include "sattn/error.hpp"

namespace sattn::metrics {

namespace {

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

const Vec2* find(const Tracks& tracks, PedId ped, std::size_t step) {
  const auto it = tracks.find(ped);
  if (it == tracks.end()) return nullptr;
  const auto jt = it->second.find(step);
  return jt == it->second.end() ? nullptr : &jt->second;
}

}  // namespace

void ErrorSums::add_window(const Tracks& predicted, const Tracks& truth, std::size_t final_step) {
  for (const auto& [ped, track] : predicted) {
    bool counted = false;
    for (const auto& [step, position] : track) {
      const Vec2* target = find(truth, ped, step);
      if (target == nullptr) continue;
      displacement_sum += distance(position, *target);
      ++displacement_terms;
      counted = true;
    }
    if (counted) ++pedestrians;
    const Vec2* p = find(predicted, ped, final_step);
    const Vec2* q = find(truth, ped, final_step);
    if (p != nullptr && q != nullptr) {
      final_sum += distance(*p, *q);
      ++final_terms;
    }
  }
  ++windows;
}

void ErrorSums::merge(const ErrorSums& o) {
  displacement_sum += o.displacement_sum;
  displacement_terms += o.displacement_terms;
  final_sum += o.final_sum;
  final_terms += o.final_terms;
  pedestrians += o.pedestrians;
  windows += o.windows;
}

double ErrorSums::ade() const {
  if (displacement_terms == 0) throw DataError("nothing to evaluate");
  return displacement_sum / static_cast<double>(displacement_terms);
}

double ErrorSums::fde() const {
  if (final_terms == 0) throw DataError("nothing to evaluate: no pedestrian has a final-step truth");
  return final_sum / static_cast<double>(final_terms);
}

double ade(const Tracks& predicted, const Tracks& truth) {
  ErrorSums s;
  s.add_window(predicted, truth, 0);
  return s.ade();
}

double fde(const Tracks& predicted, const Tracks& truth, std::size_t final_step) {
  ErrorSums s;
  s.add_window(predicted, truth, final_step);
  return s.fde();
}

Tracks future_truth(const data::SequenceWindow& window) {
  Tracks truth;
  for (std::size_t t = window.observed; t < window.frames.size(); ++t) {
    for (const auto& obs : window.frames[t].entries) truth[obs.ped_id][t] = obs.position;
  }
  return truth;
}

EvalReport evaluate(const std::vector<std::pair<std::string, std::vector<data::SequenceWindow>>>& scenes,
                    const Predictor& predict) {
  EvalReport report;
  ErrorSums all;
  for (const auto& [scene, windows] : scenes) {
    ErrorSums sums;
    for (const auto& window : windows) {
      sums.add_window(predict(window), future_truth(window), window.total - 1);
    }
    report.scenes.push_back({scene, sums.ade(), sums.fde(), sums.pedestrians, sums.windows});
    all.merge(sums);
  }
  report.aggregate = {"all", all.ade(), all.fde(), all.pedestrians, all.windows};
  return report;
}

void write_report(std::ostream& out, const EvalReport& report) {
  out << "scene,ade_m,fde_m,n_peds,n_windows\n";
  auto row = [&](const SceneReport& r) {
    out << r.scene << ',' << data::format_number(r.ade_m) << ',' << data::format_number(r.fde_m)
        << ',' << r.n_peds << ',' << r.n_windows << '\n';
  };
  for (const auto& r : report.scenes) row(r);
  row(report.aggregate);
}

}  // namespace sattn::metrics
