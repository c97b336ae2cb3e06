#pragma once

#include <string>

#include "dimasr/common/rng.hpp"
#include "dimasr/nn/tensor.hpp"

namespace dimasr::nn {

/// Row-wise affine map y = x W^T + b with W stored [out, in], the layout
/// used by the pretrained checkpoints.
class Linear {
 public:
  Linear() = default;
  Linear(const std::string& name, Eigen::Index in, Eigen::Index out);

  /// Weights ~ N(0, stddev^2), zero bias.
  void init_normal(Rng& rng, double stddev);

  Matrix forward(const Matrix& x) const;
  /// Accumulates dW, db; returns dx.
  Matrix backward(const Matrix& x, const Matrix& dy);

  Eigen::Index in_features() const { return weight.value.cols(); }
  Eigen::Index out_features() const { return weight.value.rows(); }

  void collect(ParameterList& out) {
    out.push_back(&weight);
    out.push_back(&bias);
  }

  Parameter weight;
  Parameter bias;
};

/// Per-row layer normalization over the feature axis.
class LayerNorm {
 public:
  struct Cache {
    Matrix normalized;
    Eigen::VectorXd inv_std;
  };

  LayerNorm() = default;
  LayerNorm(const std::string& name, Eigen::Index dim, double eps);

  Matrix forward(const Matrix& x, Cache* cache) const;
  Matrix backward(const Cache& cache, const Matrix& dy);

  void collect(ParameterList& out) {
    out.push_back(&gamma);
    out.push_back(&beta);
  }

  Parameter gamma;
  Parameter beta;
  double eps = 1e-5;
};

/// Inverted dropout. Returns an all-ones mask (and leaves x alone) when
/// `rate` is 0 or no generator is supplied.
Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng* rng);

/// Exact (erf) GELU and its derivative.
Matrix gelu(const Matrix& x);
Matrix gelu_grad(const Matrix& x);

/// Row-wise softmax.
Matrix softmax_rows(const Matrix& x);

/// Sum of squares of every element of every gradient, square-rooted.
double global_grad_norm(const ParameterList& params);

}  // namespace dimasr::nn
