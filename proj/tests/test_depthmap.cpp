#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "pcrast/depthmap.hpp"
#include "pcrast/prng.hpp"

using namespace pcrast;

namespace {

PiecewiseMapping three_range_mapping() {
  // [0m, 10m] at nanometers, [10m, 10km] at micrometers,
  // [10km, 10000km] at millimeters.
  return PiecewiseMapping({{0.0, 10.0, 1e-9}, {10.0, 10000.0, 1e-6}, {10000.0, 1e7, 1e-3}});
}

}  // namespace

TEST_CASE("uniform millimeter quantization") {
  const UniformMapping mm(0.001);
  CHECK(quantize(mm, 3.217) == 3217);
  CHECK(quantize(mm, 0.0) == 0);
  CHECK(quantize(mm, 1e9) == 1000000000000ull);      // a million km still fits
  CHECK(quantize(mm, 1.0995e9) == 1099500000000ull);  // near the top of 2^40
  CHECK_FALSE(quantize(mm, 2e9).has_value());         // past 2^40 -> culled, not clamped
  CHECK_FALSE(quantize(mm, -0.001).has_value());
  CHECK_FALSE(quantize(mm, std::nan("")).has_value());
}

TEST_CASE("uniform reconstruct returns the lower bin edge") {
  const UniformMapping mm(0.001);
  CHECK(reconstruct(mm, 3217) == 3.217);
  CHECK(reconstruct(mm, 0) == 0.0);
  CHECK_THROWS_AS(reconstruct(mm, kDepthIndexCount), std::out_of_range);
}

TEST_CASE("uniform capacity is the full 40-bit range") {
  CHECK(capacity(UniformMapping(0.001)) == 1099511627776ull);
  CHECK(capacity(UniformMapping(12.5)) == kDepthIndexCount);
}

TEST_CASE("unit validation") {
  CHECK_THROWS_AS(UniformMapping(0.0), std::invalid_argument);
  CHECK_THROWS_AS(UniformMapping(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(UniformMapping(std::nan("")), std::invalid_argument);
}

TEST_CASE("three-range mapping capacity arithmetic") {
  const PiecewiseMapping m = three_range_mapping();
  CHECK(m.capacity() == 29980000000ull);  // 1e10 + 9.99e9 + 9.99e9
  CHECK(m.capacity() <= 30000000000ull);
  CHECK(m.capacity() <= kDepthIndexCount);
  REQUIRE(m.bases().size() == 3);
  CHECK(m.bases()[0] == 0);
  CHECK(m.bases()[1] == 10000000000ull);
  CHECK(m.bases()[2] == 19990000000ull);
}

TEST_CASE("three-range mapping quantize and reconstruct") {
  const PiecewiseMapping m = three_range_mapping();
  CHECK(quantize(m, 5.0) == 5000000000ull);
  CHECK(quantize(m, 10.0) == 10000000000ull);     // first index of range 2
  CHECK(quantize(m, 10000.0) == 19990000000ull);  // first index of range 3
  CHECK(reconstruct(m, 10000000000ull) == 10.0);
  CHECK_FALSE(quantize(m, 1e7).has_value());   // depths at hi of the last range are culled
  CHECK_FALSE(quantize(m, -1.0).has_value());
  CHECK_FALSE(quantize(m, 2e7).has_value());
  const auto top = quantize(m, 9999999.999);
  REQUIRE(top.has_value());
  CHECK(*top < m.capacity());
  CHECK_THROWS_AS(reconstruct(m, m.capacity()), std::out_of_range);
}

TEST_CASE("single range at millimeters") {
  const PiecewiseMapping m({{0.0, 1.0, 0.001}});
  CHECK(m.capacity() == 1000);
  CHECK(quantize(m, 0.9995) == 999);
  CHECK_FALSE(quantize(m, 1.0).has_value());
}

TEST_CASE("piecewise validation") {
  CHECK_THROWS_AS(PiecewiseMapping({}), std::invalid_argument);
  // gap between ranges
  CHECK_THROWS_AS(PiecewiseMapping({{0, 1, 0.1}, {2, 3, 0.1}}), std::invalid_argument);
  // overlap
  CHECK_THROWS_AS(PiecewiseMapping({{0, 2, 0.1}, {1, 3, 0.1}}), std::invalid_argument);
  // negative start
  CHECK_THROWS_AS(PiecewiseMapping({{-1, 1, 0.1}}), std::invalid_argument);
  // bad unit
  CHECK_THROWS_AS(PiecewiseMapping({{0, 1, 0.0}}), std::invalid_argument);
  // empty interval
  CHECK_THROWS_AS(PiecewiseMapping({{1, 1, 0.1}}), std::invalid_argument);
  // capacity beyond 2^40: 2200 m of nanometers is 2.2e12 bins
  CHECK_THROWS_AS(PiecewiseMapping({{0, 2200, 1e-9}}), std::invalid_argument);
}

TEST_CASE("quantize monotonicity over random depths") {
  const DepthMapper mappers[] = {DepthMapper(UniformMapping(0.001)),
                                 DepthMapper(three_range_mapping())};
  SplitMix64 rng(21);
  for (const DepthMapper& m : mappers) {
    for (int i = 0; i < 200000; ++i) {
      const double d1 = rng.next_double() * 1.2e7;
      const double step = std::exp((rng.next_double() - 0.5) * 40.0);
      const double d2 = d1 + step;
      const auto i1 = quantize(m, d1);
      const auto i2 = quantize(m, d2);
      if (i1 && i2) REQUIRE(*i1 <= *i2);
    }
  }
}

TEST_CASE("bin identity: quantize(reconstruct(i)) == i") {
  const DepthMapper mappers[] = {DepthMapper(UniformMapping(0.001)),
                                 DepthMapper(UniformMapping(1e-9)),
                                 DepthMapper(UniformMapping(7.3e-5)),
                                 DepthMapper(three_range_mapping())};
  SplitMix64 rng(22);
  for (const DepthMapper& m : mappers) {
    const std::uint64_t cap = capacity(m);
    for (int i = 0; i < 200000; ++i) {
      const std::uint64_t index = rng.next() % cap;
      const double edge = reconstruct(m, index);
      const auto back = quantize(m, edge);
      REQUIRE(back.has_value());
      REQUIRE(*back == index);
    }
  }
}

TEST_CASE("bin identity holds for randomly constructed mappings") {
  SplitMix64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    // Random contiguous ranges with units coarse enough for double
    // precision to resolve the bin edges.
    std::vector<DepthRange> ranges;
    double lo = rng.next_double() * 10.0;
    const int n = 1 + int(rng.next() % 4);
    for (int r = 0; r < n; ++r) {
      const double span = std::exp((rng.next_double() - 0.2) * 8.0);
      const double hi = lo + span;
      const double unit = std::max(span * std::pow(2.0, -30.0 * rng.next_double()), hi * 1e-12);
      ranges.push_back({lo, hi, unit});
      lo = hi;
    }
    DepthMapper m{PiecewiseMapping(ranges)};
    const std::uint64_t cap = capacity(m);
    for (int i = 0; i < 2000; ++i) {
      const std::uint64_t index = rng.next() % cap;
      const auto back = quantize(m, reconstruct(m, index));
      REQUIRE(back.has_value());
      REQUIRE(*back == index);
    }
  }
}

TEST_CASE("millimeter resolution separates depths 2mm apart across the full range") {
  const UniformMapping mm(0.001);
  SplitMix64 rng(24);
  for (int i = 0; i < 100000; ++i) {
    const double d1 = rng.next_double() * 1.0995e9;  // up to ~2^40 mm
    const double d2 = d1 + 0.002 + rng.next_double();
    const auto i1 = quantize(mm, d1);
    const auto i2 = quantize(mm, d2);
    REQUIRE(i1.has_value());
    if (!i2) continue;  // d2 past the representable range
    REQUIRE(*i1 < *i2);
  }
}
