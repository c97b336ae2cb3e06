#include <doctest.h>

#include <cmath>

#include "dimasr/common/error.hpp"
#include "dimasr/common/rng.hpp"
#include "dimasr/metrics/metrics.hpp"
#include "dimasr/metrics/report.hpp"
#include "test_support.hpp"

using namespace dimasr;
using namespace dimasr::metrics;

namespace {

std::vector<VAPair> pairs(std::initializer_list<std::pair<double, double>> xs) {
  std::vector<VAPair> out;
  for (auto [v, a] : xs) out.emplace_back(v, a);
  return out;
}

}  // namespace

TEST_CASE("rmse_va small cases") {
  const auto g = pairs({{5, 5}, {3, 3}});
  CHECK(rmse_va(g, g) == 0.0);
  CHECK(rmse_va(pairs({{6, 6}, {3, 3}}), g) == doctest::Approx(1.0));
  CHECK_THROWS_AS(rmse_va(pairs({{5, 5}}), g), UsageError);
  CHECK_THROWS_AS(rmse_va({}, {}), UsageError);
}

TEST_CASE("per-dimension and per-instance errors") {
  const auto dims = rmse_per_dimension(pairs({{6, 5}}), pairs({{5, 5}}));
  CHECK(dims.valence == 1.0);
  CHECK(dims.arousal == 0.0);
  CHECK(per_instance_errors(pairs({{8, 9}}), pairs({{5, 5}}))[0] == 5.0);
  // Failure case with pred (7.08, 7.08) against gold (2.17, 7.67).
  CHECK(per_instance_errors(pairs({{7.08, 7.08}}), pairs({{2.17, 7.67}}))[0] ==
        doctest::Approx(std::sqrt(4.91 * 4.91 + 0.59 * 0.59)).epsilon(1e-12));
  CHECK(per_instance_errors(pairs({{7.08, 7.08}}), pairs({{2.17, 7.67}}))[0] == doctest::Approx(4.945).epsilon(1e-3));
}

TEST_CASE("error distribution") {
  const std::vector<double> e{0.5, 1.5, 2.5};
  const auto d = error_distribution(e);
  CHECK(d.median == 1.5);
  CHECK(d.frac_below_1 == doctest::Approx(1.0 / 3));
  CHECK(d.frac_above_2 == doctest::Approx(1.0 / 3));
  const std::vector<double> zeros(4, 0.0);
  const auto z = error_distribution(zeros);
  CHECK(z.median == 0.0);
  CHECK(z.frac_below_1 == 1.0);
  CHECK(z.frac_above_2 == 0.0);
  const std::vector<double> even{4.0, 1.0, 3.0, 2.0};
  CHECK(error_distribution(even).median == 2.5);
  // Boundaries are strict on both sides.
  const std::vector<double> edges{1.0, 2.0};
  CHECK(error_distribution(edges).frac_below_1 == 0.0);
  CHECK(error_distribution(edges).frac_above_2 == 0.0);
  CHECK_THROWS_AS(error_distribution(std::vector<double>{}), UsageError);
}

TEST_CASE("heatmap binning") {
  CHECK(bin_index(kDefaultEdges, 3.0) == 1);
  CHECK(bin_index(kDefaultEdges, 1.0) == 0);
  CHECK(bin_index(kDefaultEdges, 9.0) == 3);
  CHECK(bin_index(kDefaultEdges, 2.999) == 0);
  const auto g = pairs({{6, 6}, {6.5, 5.5}});
  const auto grid = va_heatmap(g, g);
  CHECK(grid.at(2, 2).count == 2);
  CHECK(grid.at(2, 2).rmse == 0.0);
  CHECK(grid.at(0, 0).count == 0);
  CHECK_FALSE(grid.at(0, 0).rmse.has_value());
  const std::vector<double> unsorted{1, 5, 3, 9};
  CHECK_THROWS_AS(va_heatmap(g, g, unsorted, kDefaultEdges), UsageError);
  const std::vector<double> narrow{2, 5, 9};
  CHECK_THROWS_AS(va_heatmap(g, g, narrow, kDefaultEdges), UsageError);
}

TEST_CASE("metric properties on random sets") {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(60);
    std::vector<VAPair> p;
    std::vector<VAPair> g;
    for (std::size_t i = 0; i < n; ++i) {
      p.emplace_back(1 + 8 * rng.uniform(), 1 + 8 * rng.uniform());
      g.emplace_back(1 + 8 * rng.uniform(), 1 + 8 * rng.uniform());
    }
    const double r = rmse_va(p, g);
    const auto d = rmse_per_dimension(p, g);
    CHECK(r == doctest::Approx(rmse_va(g, p)).epsilon(1e-14));
    CHECK(r >= std::max(d.valence, d.arousal) - 1e-12);
    CHECK(r <= d.valence + d.arousal + 1e-12);
    for (double e : per_instance_errors(p, g)) {
      CHECK(e >= 0.0);
      CHECK(e <= 8.0 * std::sqrt(2.0));
    }
    auto pp = p;
    auto gg = g;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i = 0; i < n; ++i) {
      pp[i] = p[order[i]];
      gg[i] = g[order[i]];
    }
    CHECK(std::abs(rmse_va(pp, gg) - r) < 1e-12);

    const auto grid = va_heatmap(p, g);
    std::size_t count = 0;
    double sse = 0.0;
    for (const auto& c : grid.cells) {
      count += c.count;
      sse += c.sum_squared_error;
    }
    CHECK(count == n);
    CHECK(std::abs(std::sqrt(sse / static_cast<double>(n)) - r) < 1e-9);
  }
}

TEST_CASE("five-instance fixture matches hand computation") {
  // Squared errors per instance: 1, 0, 25, 4.91^2 + 0.59^2 = 24.4562, 0.5.
  const auto scored = score_files(testing::fixture("score_gold.jsonl"), testing::fixture("score_pred.jsonl"));
  const auto& r = scored.report;
  CHECK(r.n == 5);
  CHECK(r.rmse_va == doctest::Approx(std::sqrt(50.9562 / 5)).epsilon(1e-12));
  CHECK(r.rmse_v == doctest::Approx(std::sqrt(34.3581 / 5)).epsilon(1e-12));
  CHECK(r.rmse_a == doctest::Approx(std::sqrt(16.5981 / 5)).epsilon(1e-12));
  // Sorted errors: 0, 0.7071, 1, 4.9453, 5.
  CHECK(r.error_median == 1.0);
  CHECK(r.frac_below_1 == doctest::Approx(0.4));
  CHECK(r.frac_above_2 == doctest::Approx(0.4));
  const auto& h = scored.heatmap;
  CHECK(h.at(3, 3).count == 1);
  CHECK(*h.at(3, 3).rmse == doctest::Approx(1.0));
  CHECK(h.at(1, 2).count == 1);
  CHECK(*h.at(1, 2).rmse == 0.0);
  CHECK(h.at(2, 2).count == 1);
  CHECK(*h.at(2, 2).rmse == doctest::Approx(5.0));
  CHECK(h.at(0, 3).count == 1);
  CHECK(h.at(2, 0).count == 1);
  CHECK(*h.at(2, 0).rmse == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("scoring a file against itself gives zero") {
  const auto dir = testing::scratch_dir("metrics_self");
  const auto gold = data::load_labeled_instances(testing::fixture("score_gold.jsonl"), data::GoldFormat::auto_detect);
  std::vector<data::Prediction> preds;
  for (const auto& g : gold) preds.push_back({g.sentence_id, g.aspect_index, g.aspect, *g.gold});
  data::write_predictions(dir / "p.jsonl", preds);
  const auto scored = score_files(testing::fixture("score_gold.jsonl"), dir / "p.jsonl");
  CHECK(scored.report.rmse_va == 0.0);
  CHECK(scored.report.frac_below_1 == 1.0);
}

TEST_CASE("missing and duplicate predictions are reported") {
  const auto dir = testing::scratch_dir("metrics_missing");
  auto preds = data::read_predictions(testing::fixture("score_pred.jsonl"));
  const auto last = preds.back();
  preds.pop_back();
  data::write_predictions(dir / "missing.jsonl", preds);
  try {
    score_files(testing::fixture("score_gold.jsonl"), dir / "missing.jsonl");
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("s4#0") != std::string::npos);
  }
  preds.push_back(last);
  preds.push_back(last);
  data::write_predictions(dir / "dup.jsonl", preds);
  CHECK_THROWS_AS(score_files(testing::fixture("score_gold.jsonl"), dir / "dup.jsonl"), DataError);
}

TEST_CASE("report documents") {
  const auto scored = score_files(testing::fixture("score_gold.jsonl"), testing::fixture("score_pred.jsonl"));
  const auto doc = report_to_json(scored.report, scored.heatmap);
  CHECK(doc["heatmap"]["cells"].size() == 16);
  CHECK(doc["heatmap"]["cells"][0]["rmse"].is_null());
  const auto back = report_from_json(Json::parse(doc.dump()));
  CHECK(back.rmse_va == scored.report.rmse_va);
  CHECK(back.n == 5);
  const auto text = format_report_text(scored.report, scored.heatmap);
  CHECK(text.find("RMSE_VA") != std::string::npos);
  CHECK(text.find("5.000 (1)") != std::string::npos);
}
