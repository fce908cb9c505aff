#include "sattn/model/params.hpp"

#include <cmath>

#include "sattn/error.hpp"
#include "sattn/rng.hpp"

namespace sattn::model {

Mode parse_mode(std::string_view name) {
  if (name == "social_attention") return Mode::kSocialAttention;
  if (name == "independent_lstm") return Mode::kIndependentLstm;
  throw UsageError("unknown mode '" + std::string(name) +
                   "' (expected social_attention or independent_lstm)");
}

const char* to_string(Mode mode) noexcept {
  return mode == Mode::kSocialAttention ? "social_attention" : "independent_lstm";
}

void ModelConfig::validate() const {
  if (embed_dim == 0 || edge_hidden == 0 || node_hidden == 0 || attention_dim == 0) {
    throw UsageError("model dimensions must be positive");
  }
}

namespace {

Linear make_linear(std::size_t in, std::size_t out, bool with_bias = true) {
  return {num::Tensor({in, out}), with_bias ? num::Tensor({1, out}) : num::Tensor()};
}

LstmWeights make_lstm(std::size_t in, std::size_t hidden) {
  return {num::Tensor({in + hidden, 4 * hidden}), num::Tensor({1, 4 * hidden}), hidden};
}

template <class Self, class Tensor>
std::vector<std::pair<std::string, Tensor*>> named_impl(Self& p) {
  return {
      {"spatial.embed.weight", &p.spatial_embed.weight},
      {"spatial.embed.bias", &p.spatial_embed.bias},
      {"spatial.lstm.weight", &p.spatial_lstm.weight},
      {"spatial.lstm.bias", &p.spatial_lstm.bias},
      {"temporal.embed.weight", &p.temporal_embed.weight},
      {"temporal.embed.bias", &p.temporal_embed.bias},
      {"temporal.lstm.weight", &p.temporal_lstm.weight},
      {"temporal.lstm.bias", &p.temporal_lstm.bias},
      {"node.embed_position.weight", &p.node_embed_position.weight},
      {"node.embed_position.bias", &p.node_embed_position.bias},
      {"node.embed_context.weight", &p.node_embed_context.weight},
      {"node.embed_context.bias", &p.node_embed_context.bias},
      {"node.lstm.weight", &p.node_lstm.weight},
      {"node.lstm.bias", &p.node_lstm.bias},
      {"node.output.weight", &p.node_output.weight},
      {"node.output.bias", &p.node_output.bias},
      {"attention.query", &p.attention_query},
      {"attention.key", &p.attention_key},
  };
}

}  // namespace

ModelParams ModelParams::zeros(const ModelConfig& config) {
  config.validate();
  ModelParams p;
  p.config = config;
  const std::size_t e = config.embed_dim, he = config.edge_hidden, hn = config.node_hidden;
  p.spatial_embed = make_linear(2, e);
  p.spatial_lstm = make_lstm(e, he);
  p.temporal_embed = make_linear(2, e);
  p.temporal_lstm = make_lstm(e, he);
  p.node_embed_position = make_linear(2, e);
  p.node_embed_context = make_linear(2 * he, e);
  p.node_lstm = make_lstm(2 * e, hn);
  p.node_output = make_linear(hn, 5);
  p.attention_query = num::Tensor({he, config.attention_dim});
  p.attention_key = num::Tensor({he, config.attention_dim});
  return p;
}

ModelParams ModelParams::initialize(const ModelConfig& config, std::uint64_t seed) {
  ModelParams p = zeros(config);
  CounterRng rng(derive_seed(seed, "init"));
  for (auto& [name, tensor] : p.named()) {
    if (name.ends_with(".bias")) continue;
    const double bound = 1.0 / std::sqrt(static_cast<double>(tensor->rows()));
    for (double& w : tensor->data()) w = rng.uniform(-bound, bound);
  }
  for (LstmWeights* cell : {&p.spatial_lstm, &p.temporal_lstm, &p.node_lstm}) {
    for (std::size_t j = cell->hidden; j < 2 * cell->hidden; ++j) cell->bias[j] = 1.0;
  }
  return p;
}

std::vector<std::pair<std::string, num::Tensor*>> ModelParams::named() {
  return named_impl<ModelParams, num::Tensor>(*this);
}

std::vector<std::pair<std::string, const num::Tensor*>> ModelParams::named() const {
  return named_impl<const ModelParams, const num::Tensor>(*this);
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : named()) n += t->size();
  return n;
}

bool bitwise_equal(const ModelParams& a, const ModelParams& b) {
  if (!(a.config == b.config)) return false;
  const auto na = a.named();
  const auto nb = b.named();
  for (std::size_t i = 0; i < na.size(); ++i) {
    if (!num::bitwise_equal(*na[i].second, *nb[i].second)) return false;
  }
  return true;
}

BoundParams bind(num::Tape& tape, const ModelParams& params) {
  BoundParams b;
  b.tape = &tape;
  b.config = params.config;
  auto linear = [&](const Linear& l) { return BoundLinear{tape.bind(l.weight), tape.bind(l.bias)}; };
  auto lstm = [&](const LstmWeights& c) {
    return BoundLstm{tape.bind(c.weight), tape.bind(c.bias), c.hidden};
  };
  b.spatial_embed = linear(params.spatial_embed);
  b.spatial_lstm = lstm(params.spatial_lstm);
  b.temporal_embed = linear(params.temporal_embed);
  b.temporal_lstm = lstm(params.temporal_lstm);
  b.node_embed_position = linear(params.node_embed_position);
  b.node_embed_context = linear(params.node_embed_context);
  b.node_lstm = lstm(params.node_lstm);
  b.node_output = linear(params.node_output);
  b.attention_query = tape.bind(params.attention_query);
  b.attention_key = tape.bind(params.attention_key);
  b.all = {b.spatial_embed.weight,       b.spatial_embed.bias,
           b.spatial_lstm.weight,        b.spatial_lstm.bias,
           b.temporal_embed.weight,      b.temporal_embed.bias,
           b.temporal_lstm.weight,       b.temporal_lstm.bias,
           b.node_embed_position.weight, b.node_embed_position.bias,
           b.node_embed_context.weight,  b.node_embed_context.bias,
           b.node_lstm.weight,           b.node_lstm.bias,
           b.node_output.weight,         b.node_output.bias,
           b.attention_query,            b.attention_key};
  return b;
}

std::vector<num::Tensor> gradients(const num::Tape& tape, const BoundParams& bound) {
  std::vector<num::Tensor> out;
  out.reserve(bound.all.size());
  for (const num::Var& v : bound.all) out.push_back(tape.grad(v));
  return out;
}

}  // namespace sattn::model
