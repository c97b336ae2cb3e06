#pragma once

#include <cstddef>
#include <vector>

#include "dimasr/nn/tensor.hpp"

namespace dimasr::nn {

struct AdamWOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

/// Adam with decoupled weight decay (decay applied to the weights directly,
/// scaled by the current learning rate). State is positional: always pass the
/// same parameter list in the same order.
class AdamW {
 public:
  explicit AdamW(AdamWOptions options = {}) : options_(options) {}

  void step(const ParameterList& params, double learning_rate);

  std::size_t steps_taken() const { return step_; }

 private:
  AdamWOptions options_;
  std::size_t step_ = 0;
  std::vector<Matrix> first_moment_;
  std::vector<Matrix> second_moment_;
};

/// Rescales all gradients so their global L2 norm is at most `max_norm`
/// (coefficient max_norm / (norm + 1e-6), never above 1). Returns the norm
/// measured before clipping.
double clip_grad_norm(const ParameterList& params, double max_norm);

void zero_grad(const ParameterList& params);

/// Deep copy of every parameter value, for best-epoch restoration.
std::vector<Matrix> snapshot_values(const ParameterList& params);
void restore_values(const ParameterList& params, const std::vector<Matrix>& values);

}  // namespace dimasr::nn
