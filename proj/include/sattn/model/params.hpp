#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sattn/numcore/tape.hpp"
#include "sattn/numcore/tensor.hpp"

namespace sattn::model {

enum class Mode { kSocialAttention, kIndependentLstm };

Mode parse_mode(std::string_view name);  // throws UsageError
const char* to_string(Mode mode) noexcept;

struct ModelConfig {
  std::size_t embed_dim = 64;
  std::size_t edge_hidden = 256;
  std::size_t node_hidden = 128;
  std::size_t attention_dim = 64;
  // Predict the Gaussian mean as an offset from the node's current position
  // instead of an absolute coordinate.
  bool residual_mean = true;

  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// y = x * weight + bias, weight stored (in x out), bias (1 x out).
struct Linear {
  num::Tensor weight;
  num::Tensor bias;
};

// Single LSTM cell. weight is ((input + hidden) x 4*hidden) applied to
// concat(input, h); gate column blocks are ordered [input | forget | cell | output].
struct LstmWeights {
  num::Tensor weight;
  num::Tensor bias;
  std::size_t hidden = 0;
};

struct ModelParams {
  ModelConfig config;

  Linear spatial_embed;
  LstmWeights spatial_lstm;
  Linear temporal_embed;
  LstmWeights temporal_lstm;

  Linear node_embed_position;  // node feature -> embedding
  Linear node_embed_context;   // concat(temporal state, attention context) -> embedding
  LstmWeights node_lstm;
  Linear node_output;          // node state -> 5 Gaussian parameters

  num::Tensor attention_query;  // projects the temporal edge state
  num::Tensor attention_key;    // projects spatial edge states

  // Correctly shaped, all zero.
  static ModelParams zeros(const ModelConfig& config);
  // Weights uniform in +-1/sqrt(fan_in); biases zero except the LSTM forget
  // gates, which start at 1.
  static ModelParams initialize(const ModelConfig& config, std::uint64_t seed);

  // Every tensor exactly once, in a fixed order that checkpoints and
  // optimizer state rely on.
  std::vector<std::pair<std::string, num::Tensor*>> named();
  std::vector<std::pair<std::string, const num::Tensor*>> named() const;

  std::size_t parameter_count() const;
};

bool bitwise_equal(const ModelParams& a, const ModelParams& b);

struct BoundLinear {
  num::Var weight;
  num::Var bias;
};

struct BoundLstm {
  num::Var weight;
  num::Var bias;
  std::size_t hidden = 0;
};

// ModelParams referenced from one tape.
struct BoundParams {
  num::Tape* tape = nullptr;
  ModelConfig config;
  BoundLinear spatial_embed;
  BoundLstm spatial_lstm;
  BoundLinear temporal_embed;
  BoundLstm temporal_lstm;
  BoundLinear node_embed_position;
  BoundLinear node_embed_context;
  BoundLstm node_lstm;
  BoundLinear node_output;
  num::Var attention_query;
  num::Var attention_key;
  std::vector<num::Var> all;  // ModelParams::named() order
};

BoundParams bind(num::Tape& tape, const ModelParams& params);

// Gradients after tape.backward(), aligned with ModelParams::named().
std::vector<num::Tensor> gradients(const num::Tape& tape, const BoundParams& bound);

}  // namespace sattn::model
