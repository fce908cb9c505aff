#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sattn/model/params.hpp"

namespace sattn::training {

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t epochs = 100;
  std::size_t batch_size = 8;
  double grad_clip_norm = 10.0;
  std::uint64_t seed = 0;
  std::size_t t_obs = 8;
  std::size_t t_pred = 20;
  model::Mode mode = model::Mode::kSocialAttention;
  std::size_t validation_percent = 20;
  model::ModelConfig model;

  void validate() const;  // throws UsageError
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Flat `key=value` lines; `#` starts a comment, blank lines are skipped.
// Malformed lines raise UsageError with the line number.
KeyValues parse_key_values(std::istream& in);
void write_key_values(std::ostream& out, const KeyValues& values);

// Field names accepted by set_field, in to_key_values order.
const std::vector<std::string>& train_config_keys();

// Returns false for an unknown key; a bad value raises UsageError.
bool set_field(TrainConfig& config, std::string_view key, std::string_view value);
KeyValues to_key_values(const TrainConfig& config);

// Strict number parsing for config values and CLI flags.
double parse_double(std::string_view key, std::string_view value);
std::uint64_t parse_unsigned(std::string_view key, std::string_view value);
bool parse_bool(std::string_view key, std::string_view value);

}  // namespace sattn::training
