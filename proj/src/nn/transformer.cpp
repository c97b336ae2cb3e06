#include "dimasr/nn/transformer.hpp"

#include <cmath>

#include <fmt/format.h>

#include "dimasr/common/error.hpp"

namespace dimasr::nn {

void EncoderConfig::validate() const {
  if (vocab_size <= 0 || hidden_size <= 0 || num_layers < 0 || num_heads <= 0 || intermediate_size <= 0 ||
      type_vocab_size <= 0 || position_offset < 0) {
    throw UsageError("encoder config: sizes must be positive");
  }
  if (hidden_size % num_heads != 0) {
    throw UsageError(fmt::format("encoder config: hidden_size {} is not divisible by num_heads {}", hidden_size,
                                 num_heads));
  }
  if (max_sequence_length() < 3) {
    throw UsageError(fmt::format("encoder config: max_positions {} leaves no room for tokens", max_positions));
  }
  if (hidden_dropout < 0.0 || hidden_dropout >= 1.0 || attention_dropout < 0.0 || attention_dropout >= 1.0) {
    throw UsageError("encoder config: dropout rates must be in [0, 1)");
  }
}

TransformerEncoder::TransformerEncoder(const EncoderConfig& config) : config_(config) {
  config_.validate();
  const Eigen::Index d = config.hidden_size;
  word_embeddings_ = Parameter("embeddings.word_embeddings.weight", Matrix::Zero(config.vocab_size, d));
  position_embeddings_ = Parameter("embeddings.position_embeddings.weight", Matrix::Zero(config.max_positions, d));
  token_type_embeddings_ =
      Parameter("embeddings.token_type_embeddings.weight", Matrix::Zero(config.type_vocab_size, d));
  embedding_norm_ = LayerNorm("embeddings.LayerNorm", d, config.layer_norm_eps);
  layers_.reserve(static_cast<std::size_t>(config.num_layers));
  for (int i = 0; i < config.num_layers; ++i) {
    const std::string prefix = fmt::format("encoder.layer.{}.", i);
    layers_.push_back(Layer{
        Linear(prefix + "attention.self.query", d, d),
        Linear(prefix + "attention.self.key", d, d),
        Linear(prefix + "attention.self.value", d, d),
        Linear(prefix + "attention.output.dense", d, d),
        LayerNorm(prefix + "attention.output.LayerNorm", d, config.layer_norm_eps),
        Linear(prefix + "intermediate.dense", d, config.intermediate_size),
        Linear(prefix + "output.dense", config.intermediate_size, d),
        LayerNorm(prefix + "output.LayerNorm", d, config.layer_norm_eps),
    });
  }
}

void TransformerEncoder::init_random(Rng& rng, double stddev) {
  for (Parameter* p : {&word_embeddings_, &position_embeddings_, &token_type_embeddings_}) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) p->value.data()[i] = rng.normal() * stddev;
  }
  for (auto& layer : layers_) {
    for (Linear* linear : {&layer.query, &layer.key, &layer.value, &layer.attn_out, &layer.ffn_in, &layer.ffn_out}) {
      linear->init_normal(rng, stddev);
    }
  }
}

Matrix TransformerEncoder::forward(std::span<const int> tokens, Rng* rng, Tape* tape) const {
  const auto length = static_cast<Eigen::Index>(tokens.size());
  if (length == 0) throw UsageError("encoder input is empty");
  if (length > config_.max_sequence_length()) {
    throw UsageError(fmt::format("sequence of {} tokens exceeds the position table ({})", length,
                                 config_.max_sequence_length()));
  }
  Matrix embedded(length, config_.hidden_size);
  for (Eigen::Index i = 0; i < length; ++i) {
    const int id = tokens[static_cast<std::size_t>(i)];
    if (id < 0 || id >= config_.vocab_size) {
      throw UsageError(fmt::format("token id {} outside vocabulary of {}", id, config_.vocab_size));
    }
    embedded.row(i) = word_embeddings_.value.row(id) +
                      position_embeddings_.value.row(config_.position_offset + i) +
                      token_type_embeddings_.value.row(0);
  }

  LayerNorm::Cache norm_cache;
  Matrix x = embedding_norm_.forward(embedded, tape ? &norm_cache : nullptr);
  Matrix mask = dropout_mask(length, config_.hidden_size, config_.hidden_dropout, rng);
  x.array() *= mask.array();
  if (tape != nullptr) {
    tape->tokens.assign(tokens.begin(), tokens.end());
    tape->embedding_norm = std::move(norm_cache);
    tape->embedding_dropout = std::move(mask);
    tape->layers.assign(layers_.size(), LayerCache{});
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    x = layer_forward(layers_[i], x, rng, tape ? &tape->layers[i] : nullptr);
  }
  return x;
}

Matrix TransformerEncoder::layer_forward(const Layer& layer, const Matrix& x, Rng* rng, LayerCache* cache) const {
  const Eigen::Index length = x.rows();
  const int heads = config_.num_heads;
  const Eigen::Index head_dim = config_.hidden_size / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

  Matrix q = layer.query.forward(x);
  Matrix k = layer.key.forward(x);
  Matrix v = layer.value.forward(x);
  Matrix context(length, config_.hidden_size);
  if (cache != nullptr) {
    cache->probs.resize(static_cast<std::size_t>(heads));
    cache->probs_dropout.resize(static_cast<std::size_t>(heads));
  }
  for (int h = 0; h < heads; ++h) {
    const Eigen::Index c0 = h * head_dim;
    Matrix scores = (q.middleCols(c0, head_dim) * k.middleCols(c0, head_dim).transpose()) * scale;
    Matrix probs = softmax_rows(scores);
    Matrix drop = dropout_mask(length, length, config_.attention_dropout, rng);
    context.middleCols(c0, head_dim) = (probs.array() * drop.array()).matrix() * v.middleCols(c0, head_dim);
    if (cache != nullptr) {
      cache->probs[static_cast<std::size_t>(h)] = std::move(probs);
      cache->probs_dropout[static_cast<std::size_t>(h)] = std::move(drop);
    }
  }

  Matrix attn = layer.attn_out.forward(context);
  Matrix attn_drop = dropout_mask(length, config_.hidden_size, config_.hidden_dropout, rng);
  attn.array() *= attn_drop.array();
  LayerNorm::Cache attn_norm_cache;
  Matrix normed = layer.attn_norm.forward(attn + x, cache ? &attn_norm_cache : nullptr);

  Matrix pre = layer.ffn_in.forward(normed);
  Matrix act = gelu(pre);
  Matrix out = layer.ffn_out.forward(act);
  Matrix ffn_drop = dropout_mask(length, config_.hidden_size, config_.hidden_dropout, rng);
  out.array() *= ffn_drop.array();
  LayerNorm::Cache ffn_norm_cache;
  Matrix y = layer.ffn_norm.forward(out + normed, cache ? &ffn_norm_cache : nullptr);

  if (cache != nullptr) {
    cache->input = x;
    cache->q = std::move(q);
    cache->k = std::move(k);
    cache->v = std::move(v);
    cache->context = std::move(context);
    cache->attn_dropout = std::move(attn_drop);
    cache->attn_norm = std::move(attn_norm_cache);
    cache->attn_normed = std::move(normed);
    cache->ffn_pre = std::move(pre);
    cache->ffn_act = std::move(act);
    cache->ffn_dropout = std::move(ffn_drop);
    cache->ffn_norm = std::move(ffn_norm_cache);
  }
  return y;
}

Matrix TransformerEncoder::layer_backward(Layer& layer, const LayerCache& cache, const Matrix& dy) {
  const int heads = config_.num_heads;
  const Eigen::Index head_dim = config_.hidden_size / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

  // y = LN(drop(ffn_out(gelu(ffn_in(n)))) + n)
  const Matrix d_ffn_sum = layer.ffn_norm.backward(cache.ffn_norm, dy);
  const Matrix d_out = (d_ffn_sum.array() * cache.ffn_dropout.array()).matrix();
  const Matrix d_act = layer.ffn_out.backward(cache.ffn_act, d_out);
  const Matrix d_pre = (d_act.array() * gelu_grad(cache.ffn_pre).array()).matrix();
  Matrix d_normed = layer.ffn_in.backward(cache.attn_normed, d_pre) + d_ffn_sum;

  // n = LN(drop(attn_out(context)) + x)
  const Matrix d_attn_sum = layer.attn_norm.backward(cache.attn_norm, d_normed);
  const Matrix d_attn = (d_attn_sum.array() * cache.attn_dropout.array()).matrix();
  const Matrix d_context = layer.attn_out.backward(cache.context, d_attn);

  Matrix dq(cache.q.rows(), cache.q.cols());
  Matrix dk(cache.k.rows(), cache.k.cols());
  Matrix dv(cache.v.rows(), cache.v.cols());
  for (int h = 0; h < heads; ++h) {
    const Eigen::Index c0 = h * head_dim;
    const Matrix& probs = cache.probs[static_cast<std::size_t>(h)];
    const Matrix& drop = cache.probs_dropout[static_cast<std::size_t>(h)];
    const Matrix dropped = (probs.array() * drop.array()).matrix();
    const Matrix d_ctx_h = d_context.middleCols(c0, head_dim);
    dv.middleCols(c0, head_dim) = dropped.transpose() * d_ctx_h;
    const Matrix d_dropped = d_ctx_h * cache.v.middleCols(c0, head_dim).transpose();
    const Matrix d_probs = (d_dropped.array() * drop.array()).matrix();
    const Eigen::VectorXd row_dot = (d_probs.array() * probs.array()).rowwise().sum();
    const Matrix d_scores = (probs.array() * (d_probs.array().colwise() - row_dot.array())).matrix() * scale;
    dq.middleCols(c0, head_dim) = d_scores * cache.k.middleCols(c0, head_dim);
    dk.middleCols(c0, head_dim) = d_scores.transpose() * cache.q.middleCols(c0, head_dim);
  }
  Matrix dx = d_attn_sum;
  dx += layer.query.backward(cache.input, dq);
  dx += layer.key.backward(cache.input, dk);
  dx += layer.value.backward(cache.input, dv);
  return dx;
}

void TransformerEncoder::backward(const Tape& tape, const Matrix& d_hidden) {
  Matrix grad = d_hidden;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    grad = layer_backward(layers_[i], tape.layers[i], grad);
  }
  grad.array() *= tape.embedding_dropout.array();
  const Matrix d_embedded = embedding_norm_.backward(tape.embedding_norm, grad);
  for (Eigen::Index i = 0; i < tape.length(); ++i) {
    word_embeddings_.grad.row(tape.tokens[static_cast<std::size_t>(i)]) += d_embedded.row(i);
    position_embeddings_.grad.row(config_.position_offset + i) += d_embedded.row(i);
    token_type_embeddings_.grad.row(0) += d_embedded.row(i);
  }
}

ParameterList TransformerEncoder::parameters() {
  ParameterList out{&word_embeddings_, &position_embeddings_, &token_type_embeddings_};
  embedding_norm_.collect(out);
  for (auto& layer : layers_) {
    layer.query.collect(out);
    layer.key.collect(out);
    layer.value.collect(out);
    layer.attn_out.collect(out);
    layer.attn_norm.collect(out);
    layer.ffn_in.collect(out);
    layer.ffn_out.collect(out);
    layer.ffn_norm.collect(out);
  }
  return out;
}

}  // namespace dimasr::nn
