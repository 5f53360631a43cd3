#include "pcrast/baseline.hpp"

#include <chrono>
#include <stdexcept>

namespace pcrast {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t ns_since(Clock::time_point start) {
  return std::uint64_t(std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count());
}

}  // namespace

float ndc_depth_f32(double z_view, double near_clip, double far_clip, DepthMode mode) {
  if (!(near_clip > 0.0) || !(near_clip < far_clip))
    throw std::invalid_argument("ndc_depth: clip planes require 0 < near < far");
  if (z_view <= 0.0) throw std::domain_error("ndc_depth: z_view must be positive");
  double d = ((far_clip + near_clip) / (far_clip - near_clip) -
              2.0 * far_clip * near_clip / ((far_clip - near_clip) * z_view) + 1.0) /
             2.0;
  if (mode == DepthMode::Reversed) d = 1.0 - d;
  return float(d);
}

FloatDepthBuffer::FloatDepthBuffer(int width, int height, DepthMode mode,
                                   std::uint32_t background_rgb)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) throw std::invalid_argument("depth buffer: size must be at least 1x1");
  depth_.resize(std::size_t(width) * height);
  color_.resize(std::size_t(width) * height);
  clear(mode, background_rgb);
}

void FloatDepthBuffer::clear(DepthMode mode, std::uint32_t background_rgb) {
  mode_ = mode;
  const float d = clear_depth(mode);
  for (auto& v : depth_) v = d;
  for (auto& c : color_) c = background_rgb & 0xFFFFFFu;
}

ImageRGB8 FloatDepthBuffer::to_image() const {
  ImageRGB8 image(width_, height_);
  for (std::size_t i = 0; i < color_.size(); ++i) {
    image.data[i * 3] = std::uint8_t(color_[i] >> 16);
    image.data[i * 3 + 1] = std::uint8_t(color_[i] >> 8);
    image.data[i * 3 + 2] = std::uint8_t(color_[i]);
  }
  return image;
}

RenderStats rasterize_zbuffer(const PointCloud& cloud, const Camera& camera, DepthMode mode,
                              FloatDepthBuffer& buffer) {
  if (buffer.width() != camera.width || buffer.height() != camera.height)
    throw std::invalid_argument("rasterize: depth buffer size does not match camera image size");
  if (buffer.mode() != mode)
    throw std::invalid_argument("rasterize: depth buffer was cleared for a different depth mode");
  const auto start = Clock::now();
  const Projector project(camera);
  RenderStats stats;
  stats.points_in = cloud.size();
  for (const Point& pt : cloud.points()) {
    const auto hit = project(pt.position);
    if (!hit) continue;
    if (hit->depth < camera.near_clip || hit->depth > camera.far_clip) continue;
    const float d = ndc_depth_f32(hit->depth, camera.near_clip, camera.far_clip, mode);
    ++stats.fragments_written;  // survived projection and clip-range cull
    const std::size_t i = std::size_t(hit->y) * buffer.width_ + std::size_t(hit->x);
    const bool pass = mode == DepthMode::Standard ? d < buffer.depth_[i] : d > buffer.depth_[i];
    if (pass) {
      buffer.depth_[i] = d;
      buffer.color_[i] = encode_rgb(pt.r, pt.g, pt.b);
    }
  }
  stats.pass_ns[0] = ns_since(start);
  return stats;
}

RenderResult render_baseline(const PointCloud& cloud, const Camera& camera, DepthMode mode,
                             std::uint32_t background_rgb) {
  camera.validate();
  FloatDepthBuffer buffer(camera.width, camera.height, mode, background_rgb);
  RenderResult result;
  result.stats = rasterize_zbuffer(cloud, camera, mode, buffer);
  const auto start = Clock::now();
  result.image = buffer.to_image();
  result.stats.pass_ns[1] = ns_since(start);
  return result;
}

}  // namespace pcrast
