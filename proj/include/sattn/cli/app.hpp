#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sattn/error.hpp"
#include "sattn/training/config.hpp"

namespace sattn::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

int exit_code(ErrorKind kind) noexcept;

// Everything `train` needs. Config files mix these keys with TrainConfig
// field names.
struct RunConfig {
  training::TrainConfig train;
  std::vector<std::filesystem::path> scenes;   // canonical files, one per scene
  std::optional<std::size_t> held_out;          // index into scenes kept for testing
  std::optional<std::size_t> window_stride;     // training windows; default t_pred
  std::filesystem::path out_dir = "run";
};

// Run-level keys followed by the TrainConfig keys.
std::vector<std::string> run_config_keys();

// Applies one key. Unknown keys raise UsageError listing every valid key.
// Relative scene paths and out_dir are resolved against base_dir.
void apply_run_key(RunConfig& config, const std::string& key, const std::string& value,
                   const std::filesystem::path& base_dir);

RunConfig load_run_config(const std::filesystem::path& path);

// Snapshot with every key, as used by the run.
training::KeyValues resolved_key_values(const RunConfig& config);

// Entry point of the `sattn` tool. Never throws; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sattn::cli
