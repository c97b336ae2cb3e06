#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dimasr/common/rng.hpp"
#include "dimasr/nn/layers.hpp"
#include "dimasr/nn/tensor.hpp"

namespace dimasr::nn {

/// Shape of a post-LayerNorm (BERT/RoBERTa family) encoder. Field names and
/// defaults follow the XLM-RoBERTa-base config.
struct EncoderConfig {
  int vocab_size = 250002;
  int hidden_size = 768;
  int num_layers = 12;
  int num_heads = 12;
  int intermediate_size = 3072;
  int max_positions = 514;
  int type_vocab_size = 1;
  /// Position ids start here (RoBERTa reserves 0..padding_idx).
  int position_offset = 2;
  double layer_norm_eps = 1e-5;
  double hidden_dropout = 0.1;
  double attention_dropout = 0.1;

  /// Throws UsageError on inconsistent shapes.
  void validate() const;
  /// Longest token sequence the position table can hold.
  int max_sequence_length() const { return max_positions - position_offset; }
};

/// Transformer encoder that processes one unpadded sequence at a time and
/// backpropagates from a gradient on the first-token output.
class TransformerEncoder {
 public:
  struct LayerCache;
  /// Everything backward() needs from one forward pass.
  struct Tape {
    std::vector<int> tokens;
    LayerNorm::Cache embedding_norm;
    Matrix embedding_dropout;
    std::vector<LayerCache> layers;
    Eigen::Index length() const { return static_cast<Eigen::Index>(tokens.size()); }
  };

  TransformerEncoder() = default;
  explicit TransformerEncoder(const EncoderConfig& config);

  /// N(0, 0.02^2) weights, zero biases, unit LayerNorm gains.
  void init_random(Rng& rng, double stddev = 0.02);

  const EncoderConfig& config() const { return config_; }
  int hidden_size() const { return config_.hidden_size; }

  /// Full final hidden states [L, d]. `dropout_rng` null means inference.
  /// `tape` may be null when no backward pass will follow.
  Matrix forward(std::span<const int> tokens, Rng* dropout_rng, Tape* tape) const;

  /// Backpropagates d(loss)/d(hidden states) [L, d], accumulating gradients.
  void backward(const Tape& tape, const Matrix& d_hidden);

  /// Every trainable tensor, named like the HF checkpoint keys.
  ParameterList parameters();

 private:
  struct Layer {
    Linear query, key, value, attn_out;
    LayerNorm attn_norm;
    Linear ffn_in, ffn_out;
    LayerNorm ffn_norm;
  };

  Matrix layer_forward(const Layer& layer, const Matrix& x, Rng* rng, LayerCache* cache) const;
  Matrix layer_backward(Layer& layer, const LayerCache& cache, const Matrix& dy);

  EncoderConfig config_;
  Parameter word_embeddings_;
  Parameter position_embeddings_;
  Parameter token_type_embeddings_;
  LayerNorm embedding_norm_;
  std::vector<Layer> layers_;
};

struct TransformerEncoder::LayerCache {
  Matrix input;
  Matrix q, k, v;
  std::vector<Matrix> probs;          // post-softmax, per head
  std::vector<Matrix> probs_dropout;  // mask, per head
  Matrix context;
  Matrix attn_dropout;
  LayerNorm::Cache attn_norm;
  Matrix attn_normed;
  Matrix ffn_pre;
  Matrix ffn_act;
  Matrix ffn_dropout;
  LayerNorm::Cache ffn_norm;
};

}  // namespace dimasr::nn
