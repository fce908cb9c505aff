#include "sattn/training/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <map>
#include <sstream>

#include "sattn/error.hpp"

namespace sattn::training {

namespace {

constexpr char kMagic[4] = {'S', 'A', 'T', 'N'};

template <class T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <class T>
  T get_le(const char* what) {
    need(sizeof(T), what);
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      value |= static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return value;
  }

  std::string get_bytes(std::size_t n, const char* what) {
    need(n, what);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) throw FormatError(std::string("checkpoint truncated in ") + what);
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::pair<std::string, const num::Tensor*>> all_tensors(const Checkpoint& c) {
  auto named = c.params.named();
  std::vector<std::pair<std::string, const num::Tensor*>> out(named.begin(), named.end());
  for (std::size_t k = 0; k < named.size() && k < c.adam.m.size(); ++k) {
    out.emplace_back("adam.m/" + named[k].first, &c.adam.m[k]);
  }
  for (std::size_t k = 0; k < named.size() && k < c.adam.v.size(); ++k) {
    out.emplace_back("adam.v/" + named[k].first, &c.adam.v[k]);
  }
  return out;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& c) {
  const auto tensors = all_tensors(c);
  std::ostringstream manifest;
  KeyValues meta = to_key_values(c.config);
  meta.emplace_back("epoch", std::to_string(c.epoch));
  meta.emplace_back("adam_step", std::to_string(c.adam.step));
  write_key_values(manifest, meta);
  manifest << "tensors " << tensors.size() << '\n';
  for (const auto& [name, t] : tensors) {
    manifest << name << ' ' << t->rank();
    for (const std::size_t d : t->shape()) manifest << ' ' << d;
    manifest << '\n';
  }
  const std::string text = manifest.str();

  std::string out(kMagic, 4);
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint64_t>(out, text.size());
  out += text;
  for (const auto& [name, t] : tensors) {
    for (const double v : t->data()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  Reader in(bytes);
  if (in.get_bytes(4, "magic") != std::string(kMagic, 4)) throw FormatError("not a checkpoint (bad magic)");
  const auto version = in.get_le<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version) + " (expected " +
                      std::to_string(kCheckpointVersion) + ")");
  }
  const auto length = in.get_le<std::uint64_t>("manifest length");
  if (length > bytes.size()) throw FormatError("checkpoint truncated in manifest");
  std::istringstream manifest(in.get_bytes(static_cast<std::size_t>(length), "manifest"));

  Checkpoint c;
  std::string line;
  std::size_t tensor_count = 0;
  bool have_count = false;
  while (std::getline(manifest, line)) {
    if (line.rfind("tensors ", 0) == 0) {
      tensor_count = parse_unsigned("tensors", line.substr(8));
      have_count = true;
      break;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("checkpoint manifest: bad line '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "epoch") {
      c.epoch = parse_unsigned(key, value);
    } else if (key == "adam_step") {
      c.adam.step = parse_unsigned(key, value);
    } else if (!set_field(c.config, key, value)) {
      throw FormatError("checkpoint manifest: unknown key '" + key + "'");
    }
  }
  if (!have_count) throw FormatError("checkpoint manifest: missing tensor table");
  c.config.validate();

  c.params = model::ModelParams::zeros(c.config.model);
  std::map<std::string, num::Tensor*> slots;
  std::vector<std::pair<std::string, num::Tensor*>> named = c.params.named();
  c.adam.m.resize(named.size());
  c.adam.v.resize(named.size());
  for (std::size_t k = 0; k < named.size(); ++k) {
    slots[named[k].first] = named[k].second;
    c.adam.m[k] = num::Tensor(named[k].second->shape());
    c.adam.v[k] = num::Tensor(named[k].second->shape());
    slots["adam.m/" + named[k].first] = &c.adam.m[k];
    slots["adam.v/" + named[k].first] = &c.adam.v[k];
  }

  std::vector<num::Tensor*> order;
  std::map<std::string, bool> seen;
  for (std::size_t k = 0; k < tensor_count; ++k) {
    if (!std::getline(manifest, line)) throw FormatError("checkpoint manifest: tensor table truncated");
    std::istringstream fields(line);
    std::string name;
    std::size_t rank = 0;
    if (!(fields >> name >> rank)) throw FormatError("checkpoint manifest: bad tensor line '" + line + "'");
    num::Shape shape(rank);
    for (auto& d : shape) {
      if (!(fields >> d)) throw FormatError("checkpoint manifest: bad dims for " + name);
    }
    const auto slot = slots.find(name);
    if (slot == slots.end()) throw FormatError("checkpoint: unknown tensor name '" + name + "'");
    if (seen[name]) throw FormatError("checkpoint: tensor '" + name + "' listed twice");
    seen[name] = true;
    if (slot->second->shape() != shape) {
      throw FormatError("checkpoint: tensor '" + name + "' has shape " + num::to_string(shape) +
                        ", model expects " + num::to_string(slot->second->shape()));
    }
    order.push_back(slot->second);
  }
  for (const auto& [name, t] : named) {
    if (!seen[name]) throw FormatError("checkpoint: missing tensor '" + name + "'");
  }
  for (num::Tensor* t : order) {
    for (double& v : t->data()) v = std::bit_cast<double>(in.get_le<std::uint64_t>("tensor data"));
  }
  if (!in.at_end()) throw FormatError("checkpoint: trailing bytes after tensor data");
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  const std::string bytes = serialize_checkpoint(checkpoint);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return deserialize_checkpoint(buffer.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void require_mode(const Checkpoint& checkpoint, model::Mode mode) {
  if (checkpoint.config.mode != mode) {
    throw DataError(std::string("mode mismatch: checkpoint was trained as ") +
                    model::to_string(checkpoint.config.mode) + ", requested " +
                    model::to_string(mode));
  }
}

bool bitwise_equal(const Checkpoint& a, const Checkpoint& b) {
  return serialize_checkpoint(a) == serialize_checkpoint(b);
}

}  // namespace sattn::training
