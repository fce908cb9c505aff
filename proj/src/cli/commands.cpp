#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "sattn/cli/app.hpp"
#include "sattn/data/convert.hpp"
#include "sattn/data/synth.hpp"
#include "sattn/data/windows.hpp"
#include "sattn/inference/rollout.hpp"
#include "sattn/metrics/metrics.hpp"
#include "sattn/rng.hpp"
#include "sattn/stgraph/stgraph.hpp"
#include "sattn/training/checkpoint.hpp"
#include "sattn/training/trainer.hpp"

namespace sattn::cli {

namespace fs = std::filesystem;

namespace {

// Output goes to `path`, or to `fallback` when path is empty. Files are only
// created once the whole content exists.
void emit(const std::string& path, const std::string& content, std::ostream& fallback) {
  if (path.empty()) {
    fallback << content;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path);
  file << content;
  if (!file) throw IoError("failed writing " + path);
}

void require_file(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw IoError("no such file: " + path.string());
}

std::vector<std::string> split_paths(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

struct ConvertArgs {
  std::string input;
  std::string columns = "frame,id,x,y";
  std::int64_t stride = 1;
  std::string out;
};

int cmd_convert(const ConvertArgs& a, std::ostream& out) {
  const data::ColumnOrder columns = data::ColumnOrder::parse(a.columns);
  if (a.stride <= 0) throw UsageError("--stride must be positive");
  require_file(a.input);
  std::ifstream in(a.input);
  if (!in) throw IoError("cannot open " + a.input);
  const std::string text = data::convert_raw(in, columns, a.stride);
  emit(a.out, text, out);
  return kOk;
}

struct SynthArgs {
  std::string kind;
  std::size_t peds = 2;
  std::size_t frames = 20;
  std::uint64_t seed = 0;
  bool no_rotation = false;
  std::string out;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const data::SceneKind kind = data::parse_scene_kind(a.kind);
  data::SynthOptions options;
  options.random_rotation = !a.no_rotation;
  data::TrajectorySet set = data::synth_scene(kind, a.peds, a.frames, a.seed, options);
  if (!a.out.empty()) set.scene_id = fs::path(a.out).stem().string();
  emit(a.out, data::serialize(set), out);
  return kOk;
}

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string mode;
  bool deterministic = false;
  bool sample = false;
};

struct TrainArgs {
  CommonArgs common;
  std::vector<std::string> overrides;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig config;
  if (!a.common.config.empty()) config = load_run_config(a.common.config);
  for (const auto& item : a.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects KEY=VALUE, got '" + item + "'");
    apply_run_key(config, item.substr(0, eq), item.substr(eq + 1), {});
  }
  if (a.common.seed) config.train.seed = *a.common.seed;
  if (!a.common.mode.empty()) config.train.mode = model::parse_mode(a.common.mode);
  if (!a.common.out.empty()) config.out_dir = a.common.out;
  config.train.validate();
  if (config.scenes.empty()) throw UsageError("no scenes configured (set scenes=a.txt,b.txt,...)");
  if (config.held_out && *config.held_out >= config.scenes.size()) {
    throw UsageError("held_out " + std::to_string(*config.held_out) + " is out of range for " +
                     std::to_string(config.scenes.size()) + " scenes");
  }
  for (const auto& path : config.scenes) require_file(path);

  const training::TrainConfig& tc = config.train;
  const data::WindowOptions windows{tc.t_obs, tc.t_pred, config.window_stride.value_or(tc.t_pred)};
  windows.validate();
  std::vector<data::SequenceWindow> pool;
  for (std::size_t i = 0; i < config.scenes.size(); ++i) {
    if (config.held_out && *config.held_out == i) continue;
    for (auto& w : data::window_sequences(data::load_canonical(config.scenes[i]), windows)) {
      pool.push_back(std::move(w));
    }
  }
  data::DatasetSplits splits;
  data::split_train_validation(std::move(pool), tc.seed, tc.validation_percent, splits);
  if (splits.train.empty()) throw DataError("no training windows: scenes are shorter than t_pred frames");

  std::vector<graph::STGraphSequence> train_seqs, val_seqs;
  for (const auto& w : splits.train) train_seqs.push_back(graph::build_sequence(w));
  for (const auto& w : splits.validation) val_seqs.push_back(graph::build_sequence(w));
  err << "training " << model::to_string(tc.mode) << " on " << train_seqs.size()
      << " windows, validating on " << val_seqs.size() << "\n";

  const training::TrainResult result =
      training::train(train_seqs, val_seqs, tc, [&](const training::EpochLog& e, const auto&) {
        err << "epoch " << e.epoch << "/" << tc.epochs << " train_nll "
            << data::format_number(e.train_nll) << " val_nll "
            << (e.val_nll ? data::format_number(*e.val_nll) : "-") << "\n";
      });

  fs::create_directories(config.out_dir);
  training::save_checkpoint(config.out_dir / "checkpoint.satn", result.best);
  std::ostringstream log;
  training::write_training_log(log, result.log);
  emit((config.out_dir / "train_log.csv").string(), log.str(), out);
  std::ostringstream resolved;
  training::write_key_values(resolved, resolved_key_values(config));
  emit((config.out_dir / "config.resolved.txt").string(), resolved.str(), out);
  out << "wrote " << (config.out_dir / "checkpoint.satn").string() << " (epoch " << result.best.epoch
      << ")\n";
  return kOk;
}

struct RolloutArgs {
  CommonArgs common;
  std::string checkpoint;
  std::vector<std::string> data;
  std::optional<std::size_t> window;
  std::optional<std::size_t> window_stride;
};

training::Checkpoint load_for_inference(const RolloutArgs& a) {
  if (a.common.deterministic && a.common.sample) {
    throw UsageError("--deterministic and --sample are mutually exclusive");
  }
  require_file(a.checkpoint);
  training::Checkpoint ck = training::load_checkpoint(a.checkpoint);
  if (!a.common.mode.empty()) training::require_mode(ck, model::parse_mode(a.common.mode));
  return ck;
}

inference::RolloutOptions rollout_options(const CommonArgs& a, const std::string& window_id) {
  inference::RolloutOptions options;
  options.deterministic = !a.sample;
  options.seed = derive_seed(a.seed.value_or(0), window_id);
  return options;
}

std::vector<data::SequenceWindow> select_windows(const RolloutArgs& a,
                                                 const training::TrainConfig& tc,
                                                 const std::string& path) {
  require_file(path);
  const data::TrajectorySet set = data::load_canonical(path);
  data::WindowOptions options{tc.t_obs, tc.t_pred, a.window_stride.value_or(tc.t_pred)};
  if (a.window) options.stride = 1;
  options.validate();
  std::vector<data::SequenceWindow> windows = data::window_sequences(set, options);
  if (a.window) {
    for (auto& w : windows) {
      if (w.start == *a.window) return {std::move(w)};
    }
    throw DataError(path + ": no window starts at frame index " + std::to_string(*a.window) +
                    " (need " + std::to_string(tc.t_pred) +
                    " frames and someone present while observing)");
  }
  if (windows.empty()) throw DataError(path + ": fewer than " + std::to_string(tc.t_pred) + " frames");
  return windows;
}

int cmd_predict(const RolloutArgs& a, bool attention, std::ostream& out) {
  const training::Checkpoint ck = load_for_inference(a);
  const model::Mode mode = ck.config.mode;
  std::ostringstream csv;
  if (attention) {
    inference::write_attention_header(csv);
  } else {
    inference::write_forecast_header(csv);
  }
  if (a.data.empty()) throw UsageError("--data is required");
  for (const auto& path : split_paths(a.data)) {
    for (const auto& w : select_windows(a, ck.config, path)) {
      const inference::Forecast f =
          inference::rollout(w, ck.params, mode, rollout_options(a.common, w.id()));
      if (attention) {
        inference::write_attention_rows(csv, f.window_id, f.attention);
      } else {
        inference::write_forecast_rows(csv, f);
      }
    }
  }
  emit(a.common.out, csv.str(), out);
  return kOk;
}

struct EvaluateArgs {
  RolloutArgs rollout;
};

int cmd_evaluate(const EvaluateArgs& e, std::ostream& out) {
  const RolloutArgs& a = e.rollout;
  const training::Checkpoint ck = load_for_inference(a);
  std::vector<std::string> paths = split_paths(a.data);
  if (paths.empty() && !a.common.config.empty()) {
    const RunConfig config = load_run_config(a.common.config);
    if (!config.held_out || *config.held_out >= config.scenes.size()) {
      throw UsageError("config has no valid held_out scene to evaluate");
    }
    paths.push_back(config.scenes[*config.held_out].string());
  }
  if (paths.empty()) throw UsageError("give test scenes with --data or a config with held_out");

  std::vector<std::pair<std::string, std::vector<data::SequenceWindow>>> scenes;
  for (const auto& path : paths) {
    scenes.emplace_back(fs::path(path).stem().string(), select_windows(a, ck.config, path));
  }
  const metrics::EvalReport report = metrics::evaluate(scenes, [&](const data::SequenceWindow& w) {
    return inference::predicted_tracks(
        inference::rollout(w, ck.params, ck.config.mode, rollout_options(a.common, w.id())));
  });
  std::ostringstream csv;
  metrics::write_report(csv, report);
  emit(a.common.out, csv.str(), out);
  return kOk;
}

void add_common(CLI::App* cmd, CommonArgs& c, bool with_config, bool with_sampling) {
  if (with_config) cmd->add_option("--config", c.config, "key=value run config file");
  cmd->add_option("--seed", c.seed, "run seed");
  cmd->add_option("--mode", c.mode, "social_attention or independent_lstm");
  cmd->add_flag("--deterministic", c.deterministic,
                with_sampling ? "use the predicted means (default)" : "accepted; always deterministic");
  if (with_sampling) cmd->add_flag("--sample", c.sample, "sample predicted positions (uses --seed)");
}

void add_rollout(CLI::App* cmd, RolloutArgs& r) {
  cmd->add_option("--checkpoint", r.checkpoint, "trained checkpoint")->required();
  cmd->add_option("--data", r.data, "canonical scene files (comma separated or repeated)");
  cmd->add_option("--window", r.window, "only the window starting at this frame index");
  cmd->add_option("--window-stride", r.window_stride, "window stride (default t_pred)");
  cmd->add_option("--out", r.common.out, "output CSV (default stdout)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pedestrian trajectory prediction with spatio-temporal attention", "sattn"};
  app.require_subcommand(1);

  ConvertArgs convert;
  auto* c_convert = app.add_subcommand("convert", "convert a raw annotation file to canonical text");
  c_convert->add_option("input", convert.input, "raw numeric annotation file")->required();
  c_convert->add_option("--columns", convert.columns, "column order, e.g. frame,id,y,x");
  c_convert->add_option("--stride", convert.stride, "raw frames per annotation step");
  c_convert->add_option("--out", convert.out, "output file (default stdout)");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "generate a synthetic scene");
  c_synth->add_option("--kind", synth.kind, "constant_velocity, head_on_swap or crossing")->required();
  c_synth->add_option("--peds", synth.peds, "pedestrian count");
  c_synth->add_option("--frames", synth.frames, "frame count");
  c_synth->add_option("--seed", synth.seed, "generator seed");
  c_synth->add_flag("--no-rotation", synth.no_rotation, "keep pairs axis aligned");
  c_synth->add_option("--out", synth.out, "output file (default stdout)");

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "train a model; writes checkpoint, log and config");
  add_common(c_train, train.common, true, false);
  c_train->add_option("--out", train.common.out, "output directory (overrides out_dir)");
  c_train->add_option("--set", train.overrides, "override a config key (KEY=VALUE)");

  EvaluateArgs evaluate;
  auto* c_eval = app.add_subcommand("evaluate", "ADE/FDE report on test scenes");
  add_common(c_eval, evaluate.rollout.common, true, true);
  add_rollout(c_eval, evaluate.rollout);

  RolloutArgs predict;
  auto* c_predict = app.add_subcommand("predict", "forecast CSV for windows of a scene");
  add_common(c_predict, predict.common, false, true);
  add_rollout(c_predict, predict);

  RolloutArgs attention;
  auto* c_attention = app.add_subcommand("attention", "attention weights CSV for windows of a scene");
  add_common(c_attention, attention.common, false, true);
  add_rollout(c_attention, attention);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (c_convert->parsed()) return cmd_convert(convert, out);
    if (c_synth->parsed()) return cmd_synth(synth, out);
    if (c_train->parsed()) return cmd_train(train, out, err);
    if (c_eval->parsed()) return cmd_evaluate(evaluate, out);
    if (c_predict->parsed()) return cmd_predict(predict, false, out);
    if (c_attention->parsed()) return cmd_predict(attention, true, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}

}  // namespace sattn::cli
