#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include "dimasr/common/rng.hpp"
#include "dimasr/nn/tensor.hpp"

namespace dimasr::testing {

/// Largest relative error between analytic gradients (already accumulated in
/// each Parameter::grad) and central differences of `loss`, over up to
/// `per_tensor` entries of every parameter. The relative error uses
/// max(|a|, |n|, floor) as denominator so near-zero gradients compare
/// absolutely (key biases, for one, have an exactly zero gradient).
inline double gradient_check(const nn::ParameterList& params, const std::function<double()>& loss, Rng& rng,
                             int per_tensor = 6, double step = 1e-5, double floor = 1e-4) {
  double worst = 0.0;
  for (nn::Parameter* p : params) {
    const auto size = p->value.size();
    for (int k = 0; k < per_tensor && k < size; ++k) {
      const auto index = static_cast<Eigen::Index>(rng.below(static_cast<std::size_t>(size)));
      double& w = p->value.data()[index];
      const double saved = w;
      w = saved + step;
      const double up = loss();
      w = saved - step;
      const double down = loss();
      w = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double analytic = p->grad.data()[index];
      const double denom = std::max({std::abs(numeric), std::abs(analytic), floor});
      worst = std::max(worst, std::abs(numeric - analytic) / denom);
    }
  }
  return worst;
}

}  // namespace dimasr::testing
