#include "sattn/data/windows.hpp"

#include <algorithm>
#include <set>

#include "sattn/error.hpp"
#include "sattn/rng.hpp"

namespace sattn::data {

void WindowOptions::validate() const {
  if (observed == 0 || observed >= total) {
    throw UsageError("window: need 0 < T_obs < T_pred, got T_obs=" + std::to_string(observed) +
                     " T_pred=" + std::to_string(total));
  }
  if (stride == 0) throw UsageError("window: stride must be positive");
}

std::string SequenceWindow::id() const { return scene_id + ":" + std::to_string(start); }

std::vector<PedId> SequenceWindow::pedestrians() const {
  std::set<PedId> ids;
  for (const auto& f : frames) {
    for (const auto& o : f.entries) ids.insert(o.ped_id);
  }
  return {ids.begin(), ids.end()};
}

const Vec2* SequenceWindow::position(PedId ped, std::size_t step) const {
  if (step >= frames.size()) return nullptr;
  const auto& entries = frames[step].entries;
  const auto it = std::lower_bound(entries.begin(), entries.end(), ped,
                                   [](const Observation& o, PedId id) { return o.ped_id < id; });
  if (it == entries.end() || it->ped_id != ped) return nullptr;
  return &it->position;
}

bool SequenceWindow::present(PedId ped, std::size_t step) const {
  return position(ped, step) != nullptr;
}

std::vector<SequenceWindow> window_sequences(const TrajectorySet& set, const WindowOptions& options) {
  options.validate();
  std::vector<SequenceWindow> out;
  const std::size_t n = set.frames.size();
  for (std::size_t start = 0; start + options.total <= n; start += options.stride) {
    bool anyone_observed = false;
    for (std::size_t k = 0; k < options.observed && !anyone_observed; ++k) {
      anyone_observed = !set.frames[start + k].entries.empty();
    }
    if (!anyone_observed) continue;
    SequenceWindow w;
    w.scene_id = set.scene_id;
    w.start = start;
    w.observed = options.observed;
    w.total = options.total;
    w.frames.assign(set.frames.begin() + static_cast<std::ptrdiff_t>(start),
                    set.frames.begin() + static_cast<std::ptrdiff_t>(start + options.total));
    out.push_back(std::move(w));
  }
  return out;
}

void split_train_validation(std::vector<SequenceWindow> windows, std::uint64_t seed,
                            std::size_t validation_percent, DatasetSplits& out) {
  CounterRng rng(derive_seed(seed, "split"));
  rng.shuffle(windows);
  if (validation_percent > 100) throw UsageError("validation percent must be <= 100");
  const std::size_t n_val = windows.size() * validation_percent / 100;
  const std::size_t n_train = windows.size() - n_val;
  out.train.assign(windows.begin(), windows.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.validation.assign(windows.begin() + static_cast<std::ptrdiff_t>(n_train), windows.end());
}

DatasetSplits leave_one_out_splits(const std::vector<TrajectorySet>& scenes, std::size_t held_out,
                                   const WindowOptions& train_windows,
                                   const WindowOptions& test_windows, std::uint64_t seed) {
  if (held_out >= scenes.size()) {
    throw UsageError("held-out index " + std::to_string(held_out) + " out of range for " +
                     std::to_string(scenes.size()) + " scenes");
  }
  DatasetSplits splits;
  std::vector<SequenceWindow> pool;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    if (i == held_out) {
      splits.test = window_sequences(scenes[i], test_windows);
    } else {
      auto w = window_sequences(scenes[i], train_windows);
      pool.insert(pool.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
    }
  }
  split_train_validation(std::move(pool), seed, 20, splits);
  return splits;
}

}  // namespace sattn::data
