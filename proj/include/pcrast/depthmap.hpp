#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "pcrast/core.hpp"

namespace pcrast {

// Maps linear view depth (meters, double precision) to a 40-bit integer
// depth index. `unit` is the length of one index step; 0.001 gives
// millimeter steps over the full 2^40 index range.
class UniformMapping {
 public:
  explicit UniformMapping(double unit_meters);
  double unit() const { return unit_; }

 private:
  double unit_;
};

// One depth interval [lo, hi) in meters, quantized in steps of `unit`.
struct DepthRange {
  double lo = 0.0;
  double hi = 0.0;
  double unit = 0.0;
};

// Contiguous ascending ranges, each with its own step size. The index space
// is the concatenation of the per-range bins: range i starts at
// bases()[i] and holds ceil((hi-lo)/unit) bins, the last of which may be
// narrower than `unit`. Total capacity must not exceed 2^40.
class PiecewiseMapping {
 public:
  explicit PiecewiseMapping(std::vector<DepthRange> ranges);

  const std::vector<DepthRange>& ranges() const { return ranges_; }
  const std::vector<std::uint64_t>& bases() const { return bases_; }
  std::uint64_t capacity() const { return capacity_; }

 private:
  std::vector<DepthRange> ranges_;
  std::vector<std::uint64_t> bases_;   // first index of each range
  std::vector<std::uint64_t> counts_;  // bins per range
  std::uint64_t capacity_ = 0;

  friend std::optional<std::uint64_t> quantize(const PiecewiseMapping&, double);
  friend double reconstruct(const PiecewiseMapping&, std::uint64_t);
};

using DepthMapper = std::variant<UniformMapping, PiecewiseMapping>;

// Depth -> index. Absent when the depth is negative, outside every range,
// or past the last bin; out-of-range depths are culled, never clamped.
std::optional<std::uint64_t> quantize(const UniformMapping& m, double depth_meters);
std::optional<std::uint64_t> quantize(const PiecewiseMapping& m, double depth_meters);
std::optional<std::uint64_t> quantize(const DepthMapper& m, double depth_meters);

// Index -> lower edge of its depth bin, in meters. Throws std::out_of_range
// for indices past the mapping capacity (a corrupt buffer value).
double reconstruct(const UniformMapping& m, std::uint64_t index);
double reconstruct(const PiecewiseMapping& m, std::uint64_t index);
double reconstruct(const DepthMapper& m, std::uint64_t index);

std::uint64_t capacity(const UniformMapping& m);
std::uint64_t capacity(const PiecewiseMapping& m);
std::uint64_t capacity(const DepthMapper& m);

}  // namespace pcrast
