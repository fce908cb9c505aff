#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sattn/data/trajectory.hpp"

namespace sattn::data {

struct WindowOptions {
  std::size_t observed = 8;   // T_obs
  std::size_t total = 20;     // T_pred
  std::size_t stride = 20;    // default: non-overlapping windows

  void validate() const;
};

// total consecutive annotated frames of one scene. Steps [0, observed) are
// the observation span; [observed, total) are predicted.
struct SequenceWindow {
  std::string scene_id;
  std::size_t start = 0;  // index of the first frame within the scene
  std::size_t observed = 8;
  std::size_t total = 20;
  std::vector<FrameObservation> frames;

  std::string id() const;  // "<scene_id>:<start>"
  std::vector<PedId> pedestrians() const;  // ascending
  bool present(PedId ped, std::size_t step) const;
  const Vec2* position(PedId ped, std::size_t step) const;

  friend bool operator==(const SequenceWindow&, const SequenceWindow&) = default;
};

// Sliding windows over the scene's frame list. Pedestrians that join or leave
// mid-window stay in the window. Windows with nobody in the observation span
// are skipped; fewer than `total` frames yield no windows.
std::vector<SequenceWindow> window_sequences(const TrajectorySet& set, const WindowOptions& options);

struct DatasetSplits {
  std::vector<SequenceWindow> train;
  std::vector<SequenceWindow> validation;
  std::vector<SequenceWindow> test;
};

// Shuffles the windows with a stream derived from `seed` and moves the last
// floor(n * validation_percent / 100) into validation, the rest into train.
void split_train_validation(std::vector<SequenceWindow> windows, std::uint64_t seed,
                            std::size_t validation_percent, DatasetSplits& out);

// Test = windows of scenes[held_out]; the remaining scenes' windows are
// pooled and split 80/20 into train/validation.
DatasetSplits leave_one_out_splits(const std::vector<TrajectorySet>& scenes, std::size_t held_out,
                                   const WindowOptions& train_windows,
                                   const WindowOptions& test_windows, std::uint64_t seed);

}  // namespace sattn::data
