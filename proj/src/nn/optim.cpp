#include "dimasr/nn/optim.hpp"

#include <cmath>

#include <fmt/format.h>

#include "dimasr/common/error.hpp"
#include "dimasr/nn/layers.hpp"

namespace dimasr::nn {

void AdamW::step(const ParameterList& params, double learning_rate) {
  if (first_moment_.empty()) {
    first_moment_.reserve(params.size());
    second_moment_.reserve(params.size());
    for (const Parameter* p : params) {
      first_moment_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
      second_moment_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    }
  }
  if (first_moment_.size() != params.size()) {
    throw UsageError(fmt::format("AdamW: parameter list changed size ({} -> {})", first_moment_.size(),
                                 params.size()));
  }
  ++step_;
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  const double bias1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double bias2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  const double step_size = learning_rate / bias1;
  const double decay = 1.0 - learning_rate * options_.weight_decay;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    Matrix& m = first_moment_[i];
    Matrix& v = second_moment_[i];
    p.value *= decay;
    m = b1 * m + (1.0 - b1) * p.grad;
    v = b2 * v + (1.0 - b2) * p.grad.cwiseProduct(p.grad);
    const double sqrt_bias2 = std::sqrt(bias2);
    p.value.array() -= step_size * m.array() / (v.array().sqrt() / sqrt_bias2 + options_.eps);
  }
}

double clip_grad_norm(const ParameterList& params, double max_norm) {
  const double norm = global_grad_norm(params);
  const double coefficient = max_norm / (norm + 1e-6);
  if (coefficient < 1.0) {
    for (Parameter* p : params) p->grad *= coefficient;
  }
  return norm;
}

void zero_grad(const ParameterList& params) {
  for (Parameter* p : params) p->zero_grad();
}

std::vector<Matrix> snapshot_values(const ParameterList& params) {
  std::vector<Matrix> values;
  values.reserve(params.size());
  for (const Parameter* p : params) values.push_back(p->value);
  return values;
}

void restore_values(const ParameterList& params, const std::vector<Matrix>& values) {
  if (values.size() != params.size()) {
    throw UsageError("restore_values: snapshot does not match parameter list");
  }
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = values[i];
}

}  // namespace dimasr::nn
