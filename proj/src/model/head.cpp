#include "dimasr/model/head.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "dimasr/common/error.hpp"
#include "dimasr/data/va_pair.hpp"

namespace dimasr::model {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double scale_to_va(double raw) {
  static const double kLow = std::nextafter(data::kMinScore, data::kMaxScore);
  static const double kHigh = std::nextafter(data::kMaxScore, data::kMinScore);
  const double scaled = sigmoid(raw) * (data::kMaxScore - data::kMinScore) + data::kMinScore;
  if (std::isnan(scaled)) return data::kMidScore;
  return std::clamp(scaled, kLow, kHigh);
}

double scale_to_va_derivative(double raw) {
  const double s = sigmoid(raw);
  return (data::kMaxScore - data::kMinScore) * s * (1.0 - s);
}

RegressionHead::RegressionHead(const std::string& name, int input_dim, double dropout, bool internal_dropout)
    : hidden_(name + ".hidden", input_dim, input_dim / 2),
      output_(name + ".output", input_dim / 2, 1),
      dropout_(dropout),
      internal_dropout_(internal_dropout) {
  if (input_dim < 2) {
    throw UsageError(fmt::format("regression head needs input_dim >= 2, got {}", input_dim));
  }
}

void RegressionHead::init(Rng& rng, double stddev) {
  hidden_.init_normal(rng, stddev);
  output_.init_normal(rng, stddev);
}

double RegressionHead::forward(const nn::RowVector& h, Rng* rng, Cache* cache) const {
  nn::Matrix input = h;
  nn::Matrix activated = hidden_.forward(input).array().tanh().matrix();
  nn::Matrix mask = nn::dropout_mask(1, activated.cols(), internal_dropout_ ? dropout_ : 0.0, rng);
  nn::Matrix dropped = (activated.array() * mask.array()).matrix();
  const double raw = output_.forward(dropped)(0, 0);
  if (cache != nullptr) {
    cache->input = std::move(input);
    cache->activated = std::move(activated);
    cache->dropped = std::move(dropped);
    cache->mask = std::move(mask);
  }
  return raw;
}

nn::RowVector RegressionHead::backward(const Cache& cache, double d_raw) {
  const nn::Matrix d_out = nn::Matrix::Constant(1, 1, d_raw);
  const nn::Matrix d_dropped = output_.backward(cache.dropped, d_out);
  const nn::Matrix d_activated = (d_dropped.array() * cache.mask.array()).matrix();
  const nn::Matrix d_pre = (d_activated.array() * (1.0 - cache.activated.array().square())).matrix();
  return hidden_.backward(cache.input, d_pre).row(0);
}

void RegressionHead::zero_output_layer() {
  output_.weight.value.setZero();
  output_.bias.value.setZero();
}

nn::ParameterList RegressionHead::parameters() {
  nn::ParameterList out;
  hidden_.collect(out);
  output_.collect(out);
  return out;
}

}  // namespace dimasr::model
