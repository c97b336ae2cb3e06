#include "dimasr/nn/layers.hpp"

#include <cmath>
#include <numbers>

namespace dimasr::nn {

Linear::Linear(const std::string& name, Eigen::Index in, Eigen::Index out)
    : weight(name + ".weight", Matrix::Zero(out, in)), bias(name + ".bias", Matrix::Zero(1, out)) {}

void Linear::init_normal(Rng& rng, double stddev) {
  for (Eigen::Index i = 0; i < weight.value.size(); ++i) {
    weight.value.data()[i] = rng.normal() * stddev;
  }
  bias.value.setZero();
}

Matrix Linear::forward(const Matrix& x) const {
  Matrix y = x * weight.value.transpose();
  y.rowwise() += bias.value.row(0);
  return y;
}

Matrix Linear::backward(const Matrix& x, const Matrix& dy) {
  weight.grad.noalias() += dy.transpose() * x;
  bias.grad.row(0) += dy.colwise().sum();
  return dy * weight.value;
}

LayerNorm::LayerNorm(const std::string& name, Eigen::Index dim, double eps_)
    : gamma(name + ".weight", Matrix::Ones(1, dim)), beta(name + ".bias", Matrix::Zero(1, dim)), eps(eps_) {}

Matrix LayerNorm::forward(const Matrix& x, Cache* cache) const {
  const Eigen::Index rows = x.rows();
  const double dim = static_cast<double>(x.cols());
  Matrix normalized(rows, x.cols());
  Eigen::VectorXd inv_std(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double mean = x.row(r).sum() / dim;
    const RowVector centered = x.row(r).array() - mean;
    const double var = centered.squaredNorm() / dim;
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    normalized.row(r) = centered * inv_std(r);
  }
  Matrix y = normalized.array().rowwise() * gamma.value.row(0).array();
  y.rowwise() += beta.value.row(0);
  if (cache != nullptr) {
    cache->normalized = std::move(normalized);
    cache->inv_std = std::move(inv_std);
  }
  return y;
}

Matrix LayerNorm::backward(const Cache& cache, const Matrix& dy) {
  const double dim = static_cast<double>(dy.cols());
  gamma.grad.row(0) += (dy.array() * cache.normalized.array()).colwise().sum().matrix();
  beta.grad.row(0) += dy.colwise().sum();
  const Matrix dnorm = dy.array().rowwise() * gamma.value.row(0).array();
  Matrix dx(dy.rows(), dy.cols());
  for (Eigen::Index r = 0; r < dy.rows(); ++r) {
    const double mean_d = dnorm.row(r).sum() / dim;
    const double mean_dn = dnorm.row(r).dot(cache.normalized.row(r)) / dim;
    dx.row(r) = cache.inv_std(r) *
                (dnorm.row(r).array() - mean_d - cache.normalized.row(r).array() * mean_dn).matrix();
  }
  return dx;
}

Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng* rng) {
  if (rate <= 0.0 || rng == nullptr) return Matrix::Ones(rows, cols);
  Matrix mask(rows, cols);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = rng->uniform() < rate ? 0.0 : keep_scale;
  }
  return mask;
}

Matrix gelu(const Matrix& x) {
  return x.unaryExpr([](double v) { return 0.5 * v * (1.0 + std::erf(v * std::numbers::sqrt2 / 2.0)); });
}

Matrix gelu_grad(const Matrix& x) {
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return x.unaryExpr([inv_sqrt_2pi](double v) {
    return 0.5 * (1.0 + std::erf(v * std::numbers::sqrt2 / 2.0)) + v * inv_sqrt_2pi * std::exp(-0.5 * v * v);
  });
}

Matrix softmax_rows(const Matrix& x) {
  Matrix y(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double peak = x.row(r).maxCoeff();
    const RowVector e = (x.row(r).array() - peak).exp().matrix();
    y.row(r) = e / e.sum();
  }
  return y;
}

double global_grad_norm(const ParameterList& params) {
  double total = 0.0;
  for (const Parameter* p : params) total += p->grad.squaredNorm();
  return std::sqrt(total);
}

}  // namespace dimasr::nn
