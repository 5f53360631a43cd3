#include "pcrast/depthmap.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pcrast {

namespace {

// Bins are defined by their reconstructed lower edges. quantize seeds the
// search with a floor division and then corrects the result against those
// edges, so quantize and reconstruct cannot disagree near a bin boundary
// regardless of how the division rounded. The correction moves at most one
// step for any index below 2^52. With open_end the depth is culled at or
// past the final edge; otherwise the caller has already bounded it above
// and the last (possibly narrower) bin absorbs it.
std::optional<std::uint64_t> quantize_edges(double depth, double lo, double unit,
                                            std::uint64_t bin_count, bool open_end) {
  const auto edge = [&](std::uint64_t k) { return lo + double(k) * unit; };
  const double q = std::floor((depth - lo) / unit);
  std::uint64_t k = q >= double(bin_count) ? bin_count - 1 : std::uint64_t(q);
  while (k > 0 && edge(k) > depth) --k;
  while (k + 1 < bin_count && edge(k + 1) <= depth) ++k;
  if (open_end && k == bin_count - 1 && edge(bin_count) <= depth) return std::nullopt;
  return k;
}

}  // namespace

UniformMapping::UniformMapping(double unit_meters) : unit_(unit_meters) {
  if (!(unit_meters > 0.0) || !std::isfinite(unit_meters))
    throw std::invalid_argument("depth mapping: unit must be positive and finite");
}

PiecewiseMapping::PiecewiseMapping(std::vector<DepthRange> ranges) : ranges_(std::move(ranges)) {
  if (ranges_.empty()) throw std::invalid_argument("depth mapping: at least one range required");
  if (!(ranges_.front().lo >= 0.0))
    throw std::invalid_argument("depth mapping: first range must start at lo >= 0");
  std::uint64_t base = 0;
  for (std::size_t i = 0; i < ranges_.size(); ++i) {
    const DepthRange& r = ranges_[i];
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !std::isfinite(r.unit))
      throw std::invalid_argument("depth mapping: range bounds and unit must be finite");
    if (!(r.unit > 0.0)) throw std::invalid_argument("depth mapping: unit must be positive");
    if (!(r.hi > r.lo)) throw std::invalid_argument("depth mapping: range requires hi > lo");
    if (i > 0 && ranges_[i - 1].hi != r.lo)
      throw std::invalid_argument("depth mapping: ranges must be contiguous (hi_i == lo_{i+1})");
    const double bins = std::ceil((r.hi - r.lo) / r.unit);
    if (!(bins >= 1.0) || bins > double(kDepthIndexCount))
      throw std::invalid_argument("depth mapping: range spans more than 2^40 bins");
    const std::uint64_t count = std::uint64_t(bins);
    if (count > kDepthIndexCount - base)
      throw std::invalid_argument("depth mapping: total capacity exceeds 2^40 (" +
                                  std::to_string(kDepthIndexCount) + ")");
    bases_.push_back(base);
    counts_.push_back(count);
    base += count;
  }
  capacity_ = base;
}

std::optional<std::uint64_t> quantize(const UniformMapping& m, double depth) {
  if (!(depth >= 0.0)) return std::nullopt;
  return quantize_edges(depth, 0.0, m.unit(), kDepthIndexCount, /*open_end=*/true);
}

std::optional<std::uint64_t> quantize(const PiecewiseMapping& m, double depth) {
  if (!(depth >= m.ranges_.front().lo)) return std::nullopt;
  for (std::size_t i = 0; i < m.ranges_.size(); ++i) {
    const DepthRange& r = m.ranges_[i];
    if (depth < r.hi) {
      const auto k = quantize_edges(depth, r.lo, r.unit, m.counts_[i], /*open_end=*/false);
      if (!k) return std::nullopt;
      return m.bases_[i] + *k;
    }
  }
  return std::nullopt;  // at or past the upper end of the last range
}

std::optional<std::uint64_t> quantize(const DepthMapper& m, double depth) {
  return std::visit([&](const auto& mapping) { return quantize(mapping, depth); }, m);
}

double reconstruct(const UniformMapping& m, std::uint64_t index) {
  if (index >= kDepthIndexCount)
    throw std::out_of_range("reconstruct: index " + std::to_string(index) +
                            " exceeds mapping capacity (corrupt framebuffer value?)");
  return double(index) * m.unit();
}

double reconstruct(const PiecewiseMapping& m, std::uint64_t index) {
  if (index >= m.capacity_)
    throw std::out_of_range("reconstruct: index " + std::to_string(index) +
                            " exceeds mapping capacity (corrupt framebuffer value?)");
  std::size_t i = m.ranges_.size() - 1;
  while (m.bases_[i] > index) --i;
  return m.ranges_[i].lo + double(index - m.bases_[i]) * m.ranges_[i].unit;
}

double reconstruct(const DepthMapper& m, std::uint64_t index) {
  return std::visit([&](const auto& mapping) { return reconstruct(mapping, index); }, m);
}

std::uint64_t capacity(const UniformMapping&) { return kDepthIndexCount; }

std::uint64_t capacity(const PiecewiseMapping& m) { return m.capacity(); }

std::uint64_t capacity(const DepthMapper& m) {
  return std::visit([](const auto& mapping) { return capacity(mapping); }, m);
}

}  // namespace pcrast
