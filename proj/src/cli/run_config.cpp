#include "sattn/cli/app.hpp"

#include <fstream>

namespace sattn::cli {

namespace fs = std::filesystem;

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kUsage:
      return kUsage;
    case ErrorKind::kNumerical:
      return kNumerical;
    default:
      return kData;
  }
}

std::vector<std::string> run_config_keys() {
  std::vector<std::string> keys = {"scenes", "held_out", "window_stride", "out_dir"};
  for (const auto& k : training::train_config_keys()) keys.push_back(k);
  return keys;
}

namespace {

fs::path resolve(const fs::path& base, const std::string& value) {
  const fs::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    const auto end = comma == std::string::npos ? value.size() : comma;
    std::string item = value.substr(start, end - start);
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first != std::string::npos) out.push_back(item.substr(first, last - first + 1));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

void apply_run_key(RunConfig& c, const std::string& key, const std::string& value,
                   const fs::path& base_dir) {
  if (key == "scenes") {
    c.scenes.clear();
    for (const auto& item : split_list(value)) c.scenes.push_back(resolve(base_dir, item));
  } else if (key == "held_out") {
    if (value.empty() || value == "none") {
      c.held_out.reset();
    } else {
      c.held_out = training::parse_unsigned(key, value);
    }
  } else if (key == "window_stride") {
    c.window_stride = training::parse_unsigned(key, value);
  } else if (key == "out_dir") {
    c.out_dir = resolve(base_dir, value);
  } else if (!training::set_field(c.train, key, value)) {
    std::string valid;
    for (const auto& k : run_config_keys()) valid += (valid.empty() ? "" : ", ") + k;
    throw UsageError("unknown config key '" + key + "'; valid keys: " + valid);
  }
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  RunConfig config;
  for (const auto& [key, value] : training::parse_key_values(in)) {
    apply_run_key(config, key, value, path.parent_path());
  }
  return config;
}

training::KeyValues resolved_key_values(const RunConfig& c) {
  std::string scenes;
  for (const auto& s : c.scenes) scenes += (scenes.empty() ? "" : ",") + s.string();
  training::KeyValues kv = {
      {"scenes", scenes},
      {"held_out", c.held_out ? std::to_string(*c.held_out) : "none"},
      {"window_stride", std::to_string(c.window_stride.value_or(c.train.t_pred))},
      {"out_dir", c.out_dir.string()},
  };
  for (auto& entry : training::to_key_values(c.train)) kv.push_back(std::move(entry));
  return kv;
}

}  // namespace sattn::cli
