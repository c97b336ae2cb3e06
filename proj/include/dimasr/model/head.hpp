#pragma once

#include <string>

#include "dimasr/common/rng.hpp"
#include "dimasr/nn/layers.hpp"

namespace dimasr::model {

/// d -> floor(d/2) -> 1 feed-forward head with Tanh and optional dropout
/// between the layers. Produces the raw (pre-sigmoid) score.
class RegressionHead {
 public:
  struct Cache {
    nn::Matrix input;
    nn::Matrix activated;
    nn::Matrix dropped;
    nn::Matrix mask;
  };

  RegressionHead() = default;
  RegressionHead(const std::string& name, int input_dim, double dropout, bool internal_dropout);

  /// Small normal weights, zero biases.
  void init(Rng& rng, double stddev = 0.02);

  double forward(const nn::RowVector& h, Rng* dropout_rng, Cache* cache) const;
  /// Accumulates gradients; returns d(raw)/dh scaled by `d_raw`.
  nn::RowVector backward(const Cache& cache, double d_raw);

  int hidden_width() const { return static_cast<int>(hidden_.out_features()); }
  void zero_output_layer();

  nn::Linear& hidden_layer() { return hidden_; }
  nn::Linear& output_layer() { return output_; }
  nn::ParameterList parameters();

 private:
  nn::Linear hidden_;
  nn::Linear output_;
  double dropout_ = 0.0;
  bool internal_dropout_ = true;
};

/// sigmoid(raw) * 8 + 1, kept strictly inside (1, 9) even where the sigmoid
/// saturates in floating point.
double scale_to_va(double raw);
/// d scale_to_va / d raw = 8 sigmoid(raw) (1 - sigmoid(raw)).
double scale_to_va_derivative(double raw);

}  // namespace dimasr::model
