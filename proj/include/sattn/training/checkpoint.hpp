#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "sattn/model/params.hpp"
#include "sattn/training/config.hpp"
#include "sattn/training/optimizer.hpp"

namespace sattn::training {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  TrainConfig config;
  model::ModelParams params;
  AdamState adam;       // moments aligned with params.named()
  std::size_t epoch = 0;  // epoch the parameters come from, 1-based; 0 = untrained
};

// Layout: "SATN", u32 version, u64 manifest length, manifest text, then each
// tensor's row-major little-endian doubles in manifest order. The manifest
// holds `key=value` metadata lines, a `tensors N` line, and one
// `name rank dim...` line per tensor.
std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Throws DataError "mode mismatch ..." when the checkpoint was trained in a
// different mode.
void require_mode(const Checkpoint& checkpoint, model::Mode mode);

bool bitwise_equal(const Checkpoint& a, const Checkpoint& b);

}  // namespace sattn::training
