#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dimasr/data/dataset.hpp"
#include "dimasr/model/encoder_adapter.hpp"
#include "dimasr/model/head.hpp"

namespace dimasr::model {

struct ModelOptions {
  /// Dropout on the first-token vector, shared by both heads.
  double input_dropout = 0.1;
  /// Dropout between the two layers of each head.
  double head_dropout = 0.1;
  bool head_internal_dropout = true;
};

enum class Mode { train, eval };

/// Encoder followed by two independent bounded regression heads, one for
/// valence and one for arousal.
class DimASRModel {
 public:
  /// Everything needed to backpropagate one instance.
  struct Trace {
    nn::TransformerEncoder::Tape tape;
    nn::Matrix input_mask;
    RegressionHead::Cache valence;
    RegressionHead::Cache arousal;
    double raw_valence = 0.0;
    double raw_arousal = 0.0;
  };

  DimASRModel(EncoderAdapter encoder, ModelOptions options, std::uint64_t seed);

  /// One VAPair per instance, in order. Eval mode is deterministic and
  /// ignores `dropout_rng`; train mode requires it. Failures are rethrown
  /// with the instance key attached.
  std::vector<data::VAPair> forward(std::span<const data::AspectInstance> batch, Mode mode,
                                    Rng* dropout_rng = nullptr) const;

  /// Train-mode forward that records a trace for backward().
  data::VAPair forward_traced(const data::AspectInstance& instance, Rng& dropout_rng, Trace& trace) const;

  /// Accumulates parameter gradients given d(loss)/d(prediction).
  void backward(const Trace& trace, double d_valence, double d_arousal);

  /// Encoder parameters first, then the valence head, then the arousal head.
  nn::ParameterList parameters();
  std::vector<const nn::Parameter*> parameters() const;

  const EncoderAdapter& encoder() const { return encoder_; }
  RegressionHead& head_valence() { return head_v_; }
  RegressionHead& head_arousal() { return head_a_; }
  const ModelOptions& options() const { return options_; }
  std::uint64_t seed() const { return seed_; }
  int hidden_dim() const { return encoder_.hidden_dim(); }

 private:
  data::VAPair run(const data::AspectInstance& instance, Rng* rng, Trace* trace) const;

  EncoderAdapter encoder_;
  ModelOptions options_;
  std::uint64_t seed_;
  RegressionHead head_v_;
  RegressionHead head_a_;
};

}  // namespace dimasr::model
