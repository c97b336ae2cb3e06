#include <doctest.h>

#include <cmath>
#include <limits>

#include "dimasr/common/error.hpp"
#include "dimasr/common/rng.hpp"
#include "dimasr/data/va_pair.hpp"

using namespace dimasr;
using namespace dimasr::data;

TEST_CASE("parse_va_string accepts canonical pairs") {
  CHECK(parse_va_string("7.50#6.80") == VAPair(7.50, 6.80));
  CHECK(parse_va_string("5.00#5.00") == VAPair(5.0, 5.0));
  CHECK(parse_va_string(" 1#9 ") == VAPair(1.0, 9.0));
}

TEST_CASE("parse_va_string rejects malformed or out-of-range text") {
  CHECK_THROWS_AS(parse_va_string("7.5"), DataError);
  CHECK_THROWS_AS(parse_va_string("7.5#"), DataError);
  CHECK_THROWS_AS(parse_va_string("a#5"), DataError);
  CHECK_THROWS_AS(parse_va_string("5#5#5"), DataError);
  CHECK_THROWS_AS(parse_va_string("10.0#4.0"), DataError);
  CHECK_THROWS_AS(parse_va_string("5#0.99"), DataError);
  CHECK_THROWS_AS(parse_va_string("nan#5"), DataError);
  try {
    parse_va_string("10.0#4.0");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("valence out of range") != std::string::npos);
  }
}

TEST_CASE("VAPair construction validates; clipped projects") {
  CHECK_THROWS_AS(VAPair(0.5, 5.0), DataError);
  CHECK_THROWS_AS(VAPair(5.0, std::numeric_limits<double>::infinity()), DataError);
  CHECK(VAPair::clipped(12.3, -4.0) == VAPair(9.0, 1.0));
  CHECK(VAPair::clipped(std::nan(""), 3.0) == VAPair(5.0, 3.0));
  CHECK(VAPair::midpoint() == VAPair(5.0, 5.0));
}

TEST_CASE("format then parse is stable at two decimals") {
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const VAPair p(1.0 + 8.0 * rng.uniform(), 1.0 + 8.0 * rng.uniform());
    const std::string s = format_va_string(p);
    const VAPair back = parse_va_string(s);
    CHECK(format_va_string(back) == s);
    CHECK(std::abs(back.valence() - p.valence()) <= 0.005 + 1e-12);
    CHECK(std::abs(back.arousal() - p.arousal()) <= 0.005 + 1e-12);
  }
  CHECK(format_va_string(VAPair(7.5, 6.8)) == "7.50#6.80");
}
