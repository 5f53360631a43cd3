#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cassert>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace pcrast {

// ---------------------------------------------------------------------------
// Fragment packing
//
// A fragment is a single 64-bit word:
//
//   bits 63..24   depth index (40 bits)
//   bits 23..0    color, R in 23..16, G in 15..8, B in 7..0
//
// Unsigned order on the word equals lexicographic order on
// (depth index, color), so one atomic min keeps the closest fragment per
// pixel and breaks exact depth ties toward the smaller color value.
// ---------------------------------------------------------------------------

inline constexpr int kDepthIndexBits = 40;
inline constexpr std::uint64_t kDepthIndexCount = std::uint64_t{1} << kDepthIndexBits;
inline constexpr std::uint64_t kMaxDepthIndex = kDepthIndexCount - 1;

// Cleared cell: farthest representable depth, black color.
inline constexpr std::uint64_t kClearFragment = 0xFFFFFFFFFF000000ull;

constexpr std::uint32_t encode_rgb(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return std::uint32_t{r} << 16 | std::uint32_t{g} << 8 | b;
}

constexpr std::uint64_t pack_fragment(std::uint64_t depth_index, std::uint32_t rgb) {
  assert(depth_index < kDepthIndexCount);
  assert(rgb <= 0xFFFFFFu);
  return depth_index << 24 | rgb;
}

constexpr std::pair<std::uint64_t, std::uint32_t> unpack_fragment(std::uint64_t value) {
  return {value >> 24, std::uint32_t(value & 0xFFFFFFu)};
}

// ---------------------------------------------------------------------------
// Scene types
// ---------------------------------------------------------------------------

struct Point {
  Eigen::Vector3d position{0, 0, 0};  // meters
  std::uint8_t r = 0, g = 0, b = 0;
};

// Point container with eagerly maintained bounds. Point order is preserved
// and observable; reordering is a benchmark variable, not an implementation
// freedom.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::vector<Point> points) : points_(std::move(points)) {
    for (const Point& p : points_) bounds_.extend(p.position);
  }

  void reserve(std::size_t n) { points_.reserve(n); }

  void push_back(const Point& p) {
    assert(p.position.allFinite());
    points_.push_back(p);
    bounds_.extend(p.position);
  }

  const std::vector<Point>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }

  // Exactly covers all points; empty box for an empty cloud.
  const Eigen::AlignedBox3d& bounds() const { return bounds_; }

 private:
  std::vector<Point> points_;
  Eigen::AlignedBox3d bounds_;
};

struct Camera {
  Eigen::Vector3d eye{0, 0, 0};
  Eigen::Vector3d target{0, 0, -1};
  Eigen::Vector3d up{0, 1, 0};
  double fov_y_deg = 60.0;  // vertical field of view, (0, 180)
  int width = 0;            // image size in pixels
  int height = 0;
  double near_clip = 0.1;   // used by the float z-buffer path only
  double far_clip = 10000.0;

  void validate() const;  // throws std::invalid_argument
};

struct ProjectedPoint {
  int x = 0;
  int y = 0;
  double depth = 0.0;  // linear view depth in meters (-z in view space)
};

// Perspective projector. Right-handed look-at basis with the camera gazing
// along -Z in view space; pixel mapping by floor with a top-left origin.
// The pixel rectangle is half-open: points landing exactly on the
// right/bottom image boundary are culled, the top/left boundary is inside.
class Projector {
 public:
  explicit Projector(const Camera& camera);

  std::optional<ProjectedPoint> operator()(const Eigen::Vector3d& p) const;

 private:
  Eigen::Vector3d eye_;
  Eigen::Vector3d right_;
  Eigen::Vector3d up_;
  Eigen::Vector3d forward_;
  double ndc_scale_x_ = 1.0;  // tan(fov_y/2) * aspect
  double ndc_scale_y_ = 1.0;  // tan(fov_y/2)
  double width_ = 0.0;
  double height_ = 0.0;
};

std::optional<ProjectedPoint> project(const Camera& camera, const Point& point);

struct ImageRGB8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // row-major from the top row, 3 bytes per pixel

  ImageRGB8() = default;
  ImageRGB8(int w, int h, std::uint32_t fill_rgb = 0) : width(w), height(h) {
    data.resize(std::size_t(w) * std::size_t(h) * 3);
    for (std::size_t i = 0; i < data.size(); i += 3) {
      data[i] = std::uint8_t(fill_rgb >> 16);
      data[i + 1] = std::uint8_t(fill_rgb >> 8);
      data[i + 2] = std::uint8_t(fill_rgb);
    }
  }

  void set(int x, int y, std::uint32_t rgb) {
    const std::size_t i = (std::size_t(y) * width + x) * 3;
    data[i] = std::uint8_t(rgb >> 16);
    data[i + 1] = std::uint8_t(rgb >> 8);
    data[i + 2] = std::uint8_t(rgb);
  }

  std::uint32_t rgb(int x, int y) const {
    const std::size_t i = (std::size_t(y) * width + x) * 3;
    return std::uint32_t{data[i]} << 16 | std::uint32_t{data[i + 1]} << 8 | data[i + 2];
  }

  bool operator==(const ImageRGB8&) const = default;
};

}  // namespace pcrast
