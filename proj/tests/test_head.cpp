#include <doctest.h>

#include <cmath>

#include "dimasr/common/error.hpp"
#include "dimasr/model/head.hpp"
#include "gradient_check.hpp"
#include "test_support.hpp"

using namespace dimasr;
using namespace dimasr::model;

TEST_CASE("scale_to_va anchors and bounds") {
  CHECK(scale_to_va(0.0) == 5.0);
  CHECK(scale_to_va(1e6) < 9.0);
  CHECK(scale_to_va(-1e6) > 1.0);
  CHECK(scale_to_va(40.0) == std::nextafter(9.0, 0.0));
  CHECK(scale_to_va(std::nan("")) == 5.0);
  for (double x : {0.1, 1.0, 3.7, 12.0}) CHECK(scale_to_va(x) + scale_to_va(-x) == doctest::Approx(10.0).epsilon(1e-12));
  const double h = 1e-6;
  for (double x : {-4.0, -0.3, 0.0, 2.0}) {
    CHECK(scale_to_va_derivative(x) == doctest::Approx((scale_to_va(x + h) - scale_to_va(x - h)) / (2 * h)).epsilon(1e-7));
  }
  CHECK(scale_to_va_derivative(0.0) == 2.0);
}

TEST_CASE("head has the halving shape") {
  RegressionHead head("h", 9, 0.1, true);
  CHECK(head.hidden_width() == 4);
  CHECK(head.hidden_layer().in_features() == 9);
  CHECK(head.output_layer().in_features() == 4);
  CHECK(head.output_layer().out_features() == 1);
  CHECK_THROWS_AS(RegressionHead("h", 1, 0.1, true), UsageError);
}

TEST_CASE("zeroed output layer gives the midpoint") {
  Rng rng(4);
  RegressionHead head("h", 8, 0.1, true);
  head.init(rng);
  head.zero_output_layer();
  nn::RowVector h = nn::RowVector::Ones(1, 8);
  CHECK(scale_to_va(head.forward(h, nullptr, nullptr)) == 5.0);
}

TEST_CASE("head gradients through the scaled output match finite differences") {
  Rng rng(21);
  RegressionHead head("h", 8, 0.3, true);
  head.init(rng, 0.5);
  nn::Parameter input("h_in", nn::Matrix::Zero(1, 8));
  for (Eigen::Index i = 0; i < 8; ++i) input.value(0, i) = rng.normal();
  const double gold = 3.2;

  auto loss = [&] {
    Rng drop(5);
    const double y = scale_to_va(head.forward(input.value, &drop, nullptr));
    return (y - gold) * (y - gold);
  };
  auto params = head.parameters();
  for (auto* p : params) p->zero_grad();
  Rng drop(5);
  RegressionHead::Cache cache;
  const double raw = head.forward(input.value, &drop, &cache);
  const double y = scale_to_va(raw);
  input.grad = head.backward(cache, 2.0 * (y - gold) * scale_to_va_derivative(raw));
  params.push_back(&input);
  Rng pick(8);
  CHECK(testing::gradient_check(params, loss, pick, 40, 1e-4) < 1e-6);
}
