#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "sattn/stgraph/stgraph.hpp"
#include "sattn/training/checkpoint.hpp"
#include "sattn/training/config.hpp"

namespace sattn::training {

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double train_nll = 0.0;                 // mean per term, before each update
  std::optional<double> val_nll;          // absent with an empty validation split
  double grad_norm_mean = 0.0;            // mean pre-clip global norm
  double wallclock_s = 0.0;
};

struct TrainResult {
  Checkpoint best;  // lowest validation NLL; the last epoch without validation
  Checkpoint last;
  std::vector<EpochLog> log;
};

// Called after every epoch with the log entry and the current parameters.
using EpochCallback = std::function<void(const EpochLog&, const model::ModelParams&)>;

// Mean per-term teacher-forced NLL over windows (no gradients). Empty when
// no window has a scored term.
std::optional<double> mean_nll(const std::vector<graph::STGraphSequence>& windows,
                               const model::ModelParams& params, model::Mode mode,
                               std::size_t observed);

// Batched Adam training. Each batch accumulates per-window gradients in window
// order, divides by the batch's term count, clips and updates once.
TrainResult train(const std::vector<graph::STGraphSequence>& train_windows,
                  const std::vector<graph::STGraphSequence>& validation_windows,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

// Same loop starting from given parameters (fresh optimizer state).
TrainResult train_from(model::ModelParams initial,
                       const std::vector<graph::STGraphSequence>& train_windows,
                       const std::vector<graph::STGraphSequence>& validation_windows,
                       const TrainConfig& config, const EpochCallback& on_epoch = {});

// CSV: epoch,train_nll,val_nll,grad_norm_mean,wallclock_s; val_nll empty
// when absent.
void write_training_log(std::ostream& out, const std::vector<EpochLog>& log);

}  // namespace sattn::training
