#include <doctest.h>

#include <filesystem>

#include "dimasr/common/error.hpp"
#include "dimasr/common/json_lines.hpp"
#include "dimasr/model/checkpoint.hpp"
#include "dimasr/model/model.hpp"
#include "gradient_check.hpp"
#include "test_support.hpp"

using namespace dimasr;
using namespace dimasr::model;

namespace {

StandInOptions small() {
  StandInOptions o;
  o.hidden_size = 8;
  o.num_layers = 1;
  o.num_heads = 2;
  o.intermediate_size = 16;
  o.vocab_size = 64;
  return o;
}

data::AspectInstance instance(std::string id, std::string text, std::string aspect, double v = 5, double a = 5) {
  return {std::move(id), 0, std::move(text), std::move(aspect), data::VAPair(v, a)};
}

}  // namespace

TEST_CASE("stand-in input layout") {
  const auto enc = EncoderAdapter::stand_in(small(), 16, 1);
  const auto ids = enc.build_input("the food was great", "food");
  REQUIRE(ids.size() == 8);
  CHECK(ids[0] == 0);
  CHECK(ids[5] == 2);
  CHECK(ids[7] == 2);
  CHECK_THROWS_AS(enc.build_input("text", ""), DataError);
  CHECK_THROWS_AS(enc.build_input("text", "a b c d e f g h i j k l m n o p"), DataError);
  CHECK(enc.build_input("one two three four five six seven eight nine ten eleven twelve thirteen", "x").size() == 16);
}

TEST_CASE("full model gradients match finite differences") {
  DimASRModel model(EncoderAdapter::stand_in(small(), 32, 3), ModelOptions{}, 3);
  for (auto* p : model.head_valence().parameters()) p->value *= 25.0;
  for (auto* p : model.head_arousal().parameters()) p->value *= 25.0;
  const auto x = instance("s1", "service was slow but friendly", "service", 3.0, 7.5);

  auto loss = [&] {
    Rng drop(17);
    DimASRModel::Trace trace;
    const auto p = model.forward_traced(x, drop, trace);
    const double dv = p.valence() - x.gold->valence();
    const double da = p.arousal() - x.gold->arousal();
    return dv * dv + da * da;
  };
  auto params = model.parameters();
  for (auto* p : params) p->zero_grad();
  Rng drop(17);
  DimASRModel::Trace trace;
  const auto p = model.forward_traced(x, drop, trace);
  model.backward(trace, 2.0 * (p.valence() - 3.0), 2.0 * (p.arousal() - 7.5));
  Rng pick(2);
  CHECK(testing::gradient_check(params, loss, pick, 6) < 1e-5);
}

TEST_CASE("eval mode is deterministic; train mode needs a generator") {
  DimASRModel model(EncoderAdapter::stand_in(small(), 32, 3), ModelOptions{}, 3);
  const std::vector<data::AspectInstance> batch{instance("a", "nice screen", "screen"), instance("b", "bad keys", "keys")};
  CHECK(model.forward(batch, Mode::eval) == model.forward(batch, Mode::eval));
  CHECK_THROWS_AS(model.forward(batch, Mode::train), UsageError);
  Rng r1(1);
  Rng r2(1);
  CHECK(model.forward(batch, Mode::train, &r1) == model.forward(batch, Mode::train, &r2));
}

TEST_CASE("instance errors name the instance") {
  DimASRModel model(EncoderAdapter::stand_in(small(), 32, 3), ModelOptions{}, 3);
  const std::vector<data::AspectInstance> batch{{"bad-one", 2, "text", "", std::nullopt}};
  try {
    model.forward(batch, Mode::eval);
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("bad-one") != std::string::npos);
  }
}

TEST_CASE("checkpoint round trip preserves predictions") {
  const auto dir = testing::scratch_dir("ckpt_roundtrip");
  DimASRModel model(EncoderAdapter::stand_in(small(), 24, 9), ModelOptions{0.2, 0.1, false}, 9);
  save_checkpoint(model, dir / "ckpt");
  const auto loaded = load_checkpoint(dir / "ckpt");
  CHECK(loaded.options().input_dropout == 0.2);
  CHECK_FALSE(loaded.options().head_internal_dropout);
  CHECK(loaded.encoder().max_len() == 24);
  const std::vector<data::AspectInstance> batch{instance("a", "great battery life", "battery"),
                                                 instance("b", "服务很好", "服务")};
  CHECK(loaded.forward(batch, Mode::eval) == model.forward(batch, Mode::eval));
}

TEST_CASE("pretrained checkpoint carries its tokenizer") {
  const auto dir = testing::scratch_dir("ckpt_pretrained");
  DimASRModel model(EncoderAdapter::load_pretrained(testing::fixture("tiny_xlmr"), 64), ModelOptions{}, 5);
  save_checkpoint(model, dir / "ckpt");
  CHECK(std::filesystem::exists(dir / "ckpt" / "tokenizer.json"));
  const auto loaded = load_checkpoint(dir / "ckpt", 16);
  const std::vector<data::AspectInstance> batch{instance("a", "the food was absolutely amazing!!", "food")};
  CHECK(loaded.forward(batch, Mode::eval) == model.forward(batch, Mode::eval));
}

TEST_CASE("checkpoint validation errors") {
  const auto dir = testing::scratch_dir("ckpt_errors");
  DimASRModel model(EncoderAdapter::stand_in(small(), 24, 9), ModelOptions{}, 9);
  save_checkpoint(model, dir / "ckpt");
  try {
    load_checkpoint(dir / "ckpt", 768);
    FAIL("expected a dimension error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("hidden_dim 8") != std::string::npos);
  }
  CHECK_THROWS_AS(load_checkpoint(dir / "missing"), DataError);

  auto manifest = Json::parse(read_file(dir / "ckpt" / "checkpoint.json"));
  manifest["version"] = kCheckpointVersion + 1;
  write_file(dir / "ckpt" / "checkpoint.json", manifest.dump());
  CHECK_THROWS_AS(load_checkpoint(dir / "ckpt"), DataError);
}

TEST_CASE("zero output layers predict the midpoint everywhere") {
  DimASRModel model(EncoderAdapter::stand_in(small(), 32, 3), ModelOptions{}, 3);
  model.head_valence().zero_output_layer();
  model.head_arousal().zero_output_layer();
  const std::vector<data::AspectInstance> batch{instance("a", "x y z", "x"), instance("b", "loud fans", "fans")};
  for (const auto& p : model.forward(batch, Mode::eval)) CHECK(p == data::VAPair(5.0, 5.0));
}
