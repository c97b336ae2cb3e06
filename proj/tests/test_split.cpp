#include <doctest.h>

#include <set>

#include "dimasr/common/error.hpp"
#include "dimasr/data/split.hpp"

using namespace dimasr;
using namespace dimasr::data;

namespace {

std::vector<AspectInstance> make_sentences(int n, const std::string& prefix = "s", int aspects_every = 3) {
  std::vector<AspectInstance> out;
  for (int i = 0; i < n; ++i) {
    const std::string id = prefix + std::to_string(i);
    const std::size_t k = 1 + static_cast<std::size_t>(i % aspects_every == 0);
    for (std::size_t j = 0; j < k; ++j) out.push_back({id, j, "text " + id, "a" + std::to_string(j), VAPair(5, 5)});
  }
  return out;
}

std::set<std::string> ids(const std::vector<AspectInstance>& xs) {
  std::set<std::string> s;
  for (const auto& x : xs) s.insert(x.sentence_id);
  return s;
}

void check_disjoint(const DatasetSplit& split, std::size_t total) {
  const auto a = ids(split.train);
  const auto b = ids(split.eval);
  for (const auto& id : a) CHECK_FALSE(b.contains(id));
  CHECK(split.train.size() + split.eval.size() == total);
}

}  // namespace

TEST_CASE("80/20 development split over sentences") {
  const auto xs = make_sentences(10);
  const auto split = split_dev_protocol(xs, 0.8, 42);
  CHECK(ids(split.train).size() == 8);
  CHECK(ids(split.eval).size() == 2);
  check_disjoint(split, xs.size());
  const auto again = split_dev_protocol(xs, 0.8, 42);
  CHECK(again.train == split.train);
  CHECK(again.eval == split.eval);
}

TEST_CASE("split depends on the id set, not input order") {
  auto xs = make_sentences(30);
  const auto a = split_dev_protocol(xs, 0.8, 7);
  std::reverse(xs.begin(), xs.end());
  const auto b = split_dev_protocol(xs, 0.8, 7);
  CHECK(ids(a.eval) == ids(b.eval));
}

TEST_CASE("different seeds give different splits") {
  const auto xs = make_sentences(100);
  CHECK(ids(split_dev_protocol(xs, 0.8, 1).eval) != ids(split_dev_protocol(xs, 0.8, 2).eval));
}

TEST_CASE("split errors") {
  CHECK_THROWS_AS(split_dev_protocol(make_sentences(1), 0.8, 42), DataError);
  CHECK_THROWS_AS(split_dev_protocol(make_sentences(10), 1.0, 42), UsageError);
  CHECK_THROWS_AS(split_dev_protocol(make_sentences(10), 0.0, 42), UsageError);
}

TEST_CASE("merge and hold out") {
  const auto train = make_sentences(90, "t");
  const auto dev = make_sentences(10, "d");
  const auto split = merge_and_hold_out(train, dev, 0.1, 42);
  CHECK(ids(split.train).size() == 90);
  CHECK(ids(split.eval).size() == 10);
  check_disjoint(split, train.size() + dev.size());
  CHECK_THROWS_AS(merge_and_hold_out(train, dev, 0.0, 42), UsageError);
  CHECK_THROWS_AS(merge_and_hold_out(train, make_sentences(5, "t"), 0.1, 42), DataError);
}

TEST_CASE("merge sizes at restaurant scale") {
  const auto split = merge_and_hold_out(make_sentences(2284, "t"), make_sentences(200, "d"), 0.1, 42);
  const auto fit = ids(split.train).size();
  const auto hold = ids(split.eval).size();
  CHECK(fit + hold == 2484);
  CHECK(hold >= 248);
  CHECK(hold <= 249);
}
