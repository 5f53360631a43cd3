#pragma once

#include <cstdint>
#include <vector>

#include "pcrast/raster.hpp"

namespace pcrast {

// Float32 z-buffer rasterizer emulating the fixed-function one-pixel point
// path. Exists for the depth-precision comparison against the 40-bit
// pipeline and as the benchmark reference column; deliberately sequential
// so tie behavior is submission-order deterministic.

enum class DepthMode {
  Standard,  // near -> 0, far -> 1, depth test "less"
  Reversed,  // near -> 1, far -> 0, depth test "greater"
};

// Classic perspective NDC depth, computed in double precision and rounded
// to float32 at the end. Throws std::domain_error for z_view <= 0.
float ndc_depth_f32(double z_view, double near_clip, double far_clip, DepthMode mode);

class FloatDepthBuffer {
 public:
  FloatDepthBuffer(int width, int height, DepthMode mode, std::uint32_t background_rgb = 0);

  void clear(DepthMode mode, std::uint32_t background_rgb = 0);

  static float clear_depth(DepthMode mode) { return mode == DepthMode::Standard ? 1.0f : 0.0f; }

  int width() const { return width_; }
  int height() const { return height_; }
  DepthMode mode() const { return mode_; }
  float depth(int x, int y) const { return depth_[std::size_t(y) * width_ + x]; }
  std::uint32_t color(int x, int y) const { return color_[std::size_t(y) * width_ + x]; }

  ImageRGB8 to_image() const;

 private:
  int width_ = 0, height_ = 0;
  DepthMode mode_ = DepthMode::Standard;
  std::vector<float> depth_;
  std::vector<std::uint32_t> color_;

  friend RenderStats rasterize_zbuffer(const PointCloud&, const Camera&, DepthMode,
                                       FloatDepthBuffer&);
};

// Sequential strict-inequality depth test (the GL_LESS analogue; "greater"
// when reversed). Points outside [near_clip, far_clip] are culled. On equal
// float depth the stored fragment survives, so submission order decides
// z-fighting outcomes.
RenderStats rasterize_zbuffer(const PointCloud& cloud, const Camera& camera, DepthMode mode,
                              FloatDepthBuffer& buffer);

// Driver: clear + rasterize (pass 1), image extraction (pass 2).
RenderResult render_baseline(const PointCloud& cloud, const Camera& camera, DepthMode mode,
                             std::uint32_t background_rgb);

}  // namespace pcrast
