#include "sattn/training/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#include "sattn/data/trajectory.hpp"
#include "sattn/error.hpp"
#include "sattn/rng.hpp"
#include "sattn/training/loss.hpp"

namespace sattn::training {

std::optional<double> mean_nll(const std::vector<graph::STGraphSequence>& windows,
                               const model::ModelParams& params, model::Mode mode,
                               std::size_t observed) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& window : windows) {
    num::Tape tape(false);
    const model::BoundParams bound = model::bind(tape, params);
    const SequenceLoss loss = sequence_loss(window, bound, mode, observed);
    if (loss.count == 0) continue;
    total += loss.sum.value()[0];
    count += loss.count;
  }
  if (count == 0) return std::nullopt;
  return total / static_cast<double>(count);
}

namespace {

std::vector<const num::Tensor*> const_tensors(const model::ModelParams& p) {
  std::vector<const num::Tensor*> out;
  for (const auto& [name, t] : p.named()) out.push_back(t);
  return out;
}

}  // namespace

TrainResult train(const std::vector<graph::STGraphSequence>& train_windows,
                  const std::vector<graph::STGraphSequence>& validation_windows,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  return train_from(model::ModelParams::initialize(config.model, config.seed), train_windows,
                    validation_windows, config, on_epoch);
}

TrainResult train_from(model::ModelParams params,
                       const std::vector<graph::STGraphSequence>& train_windows,
                       const std::vector<graph::STGraphSequence>& validation_windows,
                       const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (train_windows.empty()) throw DataError("training split is empty");
  if (!(params.config == config.model)) throw UsageError("initial parameters do not match the model config");

  std::vector<std::string> names;
  std::vector<num::Tensor*> slots;
  for (auto& [name, t] : params.named()) {
    names.push_back(name);
    slots.push_back(t);
  }
  const AdamOptions adam_options{config.learning_rate, 0.9, 0.999, 1e-8};

  TrainResult result;
  result.last = {config, params, AdamState::zeros_like(const_tensors(params)), 0};
  AdamState& adam = result.last.adam;
  std::optional<double> best_val;

  CounterRng shuffle_rng(derive_seed(config.seed, "shuffle"));
  std::vector<std::size_t> order(train_windows.size());
  const auto started = std::chrono::steady_clock::now();

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    std::size_t epoch_terms = 0;
    double norm_sum = 0.0;
    std::size_t updates = 0;

    for (std::size_t first = 0; first < order.size(); first += config.batch_size) {
      const std::size_t last = std::min(order.size(), first + config.batch_size);
      std::vector<num::Tensor> grads;
      for (const num::Tensor* t : slots) grads.emplace_back(t->shape());
      std::size_t batch_terms = 0;

      for (std::size_t k = first; k < last; ++k) {
        const graph::STGraphSequence& window = train_windows[order[k]];
        num::Tape tape;
        const model::BoundParams bound = model::bind(tape, params);
        const SequenceLoss loss = sequence_loss(window, bound, config.mode, config.t_obs);
        if (loss.count == 0) continue;
        const double value = loss.sum.value()[0];
        if (!std::isfinite(value)) {
          throw NumericalError("non-finite loss in epoch " + std::to_string(epoch) + ", window " +
                               window.window_id);
        }
        tape.backward(loss.sum);
        for (std::size_t p = 0; p < slots.size(); ++p) {
          const num::Tensor g = tape.grad(bound.all[p]);
          auto dst = grads[p].data();
          auto src = g.data();
          for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
        }
        epoch_loss += value;
        epoch_terms += loss.count;
        batch_terms += loss.count;
      }
      if (batch_terms == 0) continue;

      const double inv = 1.0 / static_cast<double>(batch_terms);
      for (auto& g : grads) {
        for (double& x : g.data()) x *= inv;
      }
      const ClipResult clip = clip_global_norm(grads, config.grad_clip_norm, names);
      norm_sum += clip.norm;
      ++updates;
      adam_step(slots, grads, adam, adam_options);
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.train_nll = epoch_terms ? epoch_loss / static_cast<double>(epoch_terms) : 0.0;
    entry.grad_norm_mean = updates ? norm_sum / static_cast<double>(updates) : 0.0;
    entry.val_nll = mean_nll(validation_windows, params, config.mode, config.t_obs);
    entry.wallclock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    result.last.params = params;
    result.last.epoch = epoch;
    if (entry.val_nll) {
      if (!std::isfinite(*entry.val_nll)) {
        throw NumericalError("non-finite validation loss in epoch " + std::to_string(epoch));
      }
      if (!best_val || *entry.val_nll < *best_val) {
        best_val = entry.val_nll;
        result.best = result.last;
      }
    }
    result.log.push_back(entry);
    if (on_epoch) on_epoch(entry, params);
  }
  if (!best_val) result.best = result.last;
  return result;
}

void write_training_log(std::ostream& out, const std::vector<EpochLog>& log) {
  out << "epoch,train_nll,val_nll,grad_norm_mean,wallclock_s\n";
  for (const auto& e : log) {
    out << e.epoch << ',' << data::format_number(e.train_nll) << ','
        << (e.val_nll ? data::format_number(*e.val_nll) : "") << ','
        << data::format_number(e.grad_norm_mean) << ',' << data::format_number(e.wallclock_s)
        << '\n';
  }
}

}  // namespace sattn::training
