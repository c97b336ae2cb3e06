#include <doctest.h>

#include <cmath>

#include "dimasr/common/error.hpp"
#include "dimasr/common/json_lines.hpp"
#include "dimasr/model/encoder_adapter.hpp"
#include "test_support.hpp"

using namespace dimasr;
using namespace dimasr::model;

namespace {

const Json& expected() {
  static const Json doc = Json::parse(read_file(testing::fixture("tiny_xlmr_expected.json")));
  return doc;
}

double max_abs_diff(const nn::RowVector& got, const std::vector<double>& want) {
  REQUIRE(static_cast<std::size_t>(got.size()) == want.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < want.size(); ++i) {
    worst = std::max(worst, std::abs(got(0, static_cast<Eigen::Index>(i)) - want[i]));
  }
  return worst;
}

}  // namespace

TEST_CASE("pretrained adapter matches the reference first-token outputs") {
  const auto adapter = EncoderAdapter::load_pretrained(testing::fixture("tiny_xlmr"), 128);
  CHECK(adapter.kind() == EncoderKind::pretrained);
  CHECK(adapter.hidden_dim() == 16);
  CHECK(adapter.config().position_offset == 2);
  for (const auto& c : expected()["cases"]) {
    CAPTURE(c["text"].get<std::string>());
    const auto ids = adapter.build_input(c["text"].get<std::string>(), c["aspect"].get<std::string>());
    CHECK(ids == c["single_separator_ids"].get<std::vector<int>>());
    const auto h = adapter.encode(ids, nullptr, nullptr);
    CHECK(max_abs_diff(h, c["first_token_single"].get<std::vector<double>>()) < 1e-9);
  }
}

TEST_CASE("double separator option reproduces the paired-input convention") {
  const auto adapter = EncoderAdapter::load_pretrained(testing::fixture("tiny_xlmr"), 128, true);
  for (const auto& c : expected()["cases"]) {
    const auto ids = adapter.build_input(c["text"].get<std::string>(), c["aspect"].get<std::string>());
    CHECK(ids == c["double_separator_ids"].get<std::vector<int>>());
    const auto h = adapter.encode(ids, nullptr, nullptr);
    CHECK(max_abs_diff(h, c["first_token_double"].get<std::vector<double>>()) < 1e-9);
  }
}

TEST_CASE("truncation shortens only the text") {
  const auto adapter = EncoderAdapter::load_pretrained(testing::fixture("tiny_xlmr"), 12);
  const auto& c = expected()["cases"][6];
  const auto aspect_ids = c["aspect_ids"].get<std::vector<int>>();
  const auto ids = adapter.build_input(c["text"].get<std::string>(), c["aspect"].get<std::string>());
  REQUIRE(ids.size() == 12);
  CHECK(ids.front() == 0);
  CHECK(ids.back() == 2);
  CHECK(std::vector<int>(ids.end() - 1 - static_cast<long>(aspect_ids.size()), ids.end() - 1) == aspect_ids);
  const auto text_ids = c["text_ids"].get<std::vector<int>>();
  const std::size_t kept = 12 - 3 - aspect_ids.size();
  CHECK(std::vector<int>(ids.begin() + 1, ids.begin() + 1 + static_cast<long>(kept)) ==
        std::vector<int>(text_ids.begin(), text_ids.begin() + static_cast<long>(kept)));
}

TEST_CASE("pretrained loading errors") {
  CHECK_THROWS_AS(EncoderAdapter::load_pretrained(testing::fixture("no_such_model"), 32), Error);
  CHECK_THROWS_AS(EncoderAdapter::load_pretrained(testing::fixture("tiny_xlmr"), 200), UsageError);
}
