#include "sattn/training/config.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "sattn/data/trajectory.hpp"
#include "sattn/error.hpp"

namespace sattn::training {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw UsageError("learning_rate must be positive");
  }
  if (epochs == 0) throw UsageError("epochs must be positive");
  if (batch_size == 0) throw UsageError("batch_size must be positive");
  if (!(grad_clip_norm > 0.0)) throw UsageError("grad_clip_norm must be positive");
  if (t_obs == 0 || t_obs >= t_pred) throw UsageError("need 0 < t_obs < t_pred");
  if (validation_percent >= 100) throw UsageError("validation_percent must be below 100");
  model.validate();
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
  KeyValues out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos || trim(text.substr(0, eq)).empty()) {
      throw UsageError("config line " + std::to_string(number) + ": expected key=value");
    }
    out.emplace_back(std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1))));
  }
  return out;
}

void write_key_values(std::ostream& out, const KeyValues& values) {
  for (const auto& [k, v] : values) out << k << '=' << v << '\n';
}

const std::vector<std::string>& train_config_keys() {
  static const std::vector<std::string> keys = {
      "learning_rate", "epochs",     "batch_size",  "grad_clip_norm", "seed",
      "t_obs",         "t_pred",     "mode",        "validation_percent",
      "embed_dim",     "edge_hidden", "node_hidden", "attention_dim",  "residual_mean"};
  return keys;
}

double parse_double(std::string_view key, std::string_view value) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(v)) {
    throw UsageError(std::string(key) + ": invalid number '" + std::string(value) + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view value) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw UsageError(std::string(key) + ": invalid non-negative integer '" + std::string(value) + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw UsageError(std::string(key) + ": expected true or false, got '" + std::string(value) + "'");
}

bool set_field(TrainConfig& c, std::string_view key, std::string_view value) {
  auto size = [&] { return static_cast<std::size_t>(parse_unsigned(key, value)); };
  if (key == "learning_rate") c.learning_rate = parse_double(key, value);
  else if (key == "epochs") c.epochs = size();
  else if (key == "batch_size") c.batch_size = size();
  else if (key == "grad_clip_norm") c.grad_clip_norm = parse_double(key, value);
  else if (key == "seed") c.seed = parse_unsigned(key, value);
  else if (key == "t_obs") c.t_obs = size();
  else if (key == "t_pred") c.t_pred = size();
  else if (key == "mode") c.mode = model::parse_mode(value);
  else if (key == "validation_percent") c.validation_percent = size();
  else if (key == "embed_dim") c.model.embed_dim = size();
  else if (key == "edge_hidden") c.model.edge_hidden = size();
  else if (key == "node_hidden") c.model.node_hidden = size();
  else if (key == "attention_dim") c.model.attention_dim = size();
  else if (key == "residual_mean") c.model.residual_mean = parse_bool(key, value);
  else return false;
  return true;
}

KeyValues to_key_values(const TrainConfig& c) {
  auto num = [](double v) { return data::format_number(v); };
  return {
      {"learning_rate", num(c.learning_rate)},
      {"epochs", std::to_string(c.epochs)},
      {"batch_size", std::to_string(c.batch_size)},
      {"grad_clip_norm", num(c.grad_clip_norm)},
      {"seed", std::to_string(c.seed)},
      {"t_obs", std::to_string(c.t_obs)},
      {"t_pred", std::to_string(c.t_pred)},
      {"mode", model::to_string(c.mode)},
      {"validation_percent", std::to_string(c.validation_percent)},
      {"embed_dim", std::to_string(c.model.embed_dim)},
      {"edge_hidden", std::to_string(c.model.edge_hidden)},
      {"node_hidden", std::to_string(c.model.node_hidden)},
      {"attention_dim", std::to_string(c.model.attention_dim)},
      {"residual_mean", c.model.residual_mean ? "true" : "false"},
  };
}

}  // namespace sattn::training
