#include "pcrast/raster.hpp"

#include <atomic>
#include <chrono>
#include <stdexcept>

#include "pcrast/parallel.hpp"

namespace pcrast {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t ns_since(Clock::time_point start) {
  return std::uint64_t(std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count());
}

}  // namespace

RenderStats rasterize_atomicmin(const PointCloud& cloud, const Camera& camera,
                                const DepthMapper& mapper, Framebuffer64& fb, unsigned workers) {
  if (fb.width() != camera.width || fb.height() != camera.height)
    throw std::invalid_argument("rasterize: framebuffer size does not match camera image size");
  const auto start = Clock::now();
  const Projector project(camera);
  const auto& pts = cloud.points();
  const std::size_t row = std::size_t(fb.width());
  std::atomic<std::uint64_t> written{0};
  parallel_chunks(pts.size(), workers, [&](std::size_t lo, std::size_t hi) {
    std::uint64_t local = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      const auto hit = project(pts[i].position);
      if (!hit) continue;
      const auto index = quantize(mapper, hit->depth);
      if (!index) continue;
      fb.atomic_min(std::size_t(hit->y) * row + std::size_t(hit->x),
                    pack_fragment(*index, encode_rgb(pts[i].r, pts[i].g, pts[i].b)));
      ++local;
    }
    written.fetch_add(local, std::memory_order_relaxed);
  });
  RenderStats stats;
  stats.points_in = pts.size();
  stats.fragments_written = written.load();
  stats.pass_ns[0] = ns_since(start);
  return stats;
}

ImageRGB8 resolve_and_clear(Framebuffer64& fb, std::uint32_t background_rgb, unsigned workers) {
  ImageRGB8 image(fb.width(), fb.height());
  parallel_chunks(fb.cell_count(), workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t cell = lo; cell < hi; ++cell) {
      const std::uint64_t value = fb.load(cell);
      const std::uint32_t rgb =
          value == kClearFragment ? background_rgb : std::uint32_t(value & 0xFFFFFFu);
      image.data[cell * 3] = std::uint8_t(rgb >> 16);
      image.data[cell * 3 + 1] = std::uint8_t(rgb >> 8);
      image.data[cell * 3 + 2] = std::uint8_t(rgb);
      fb.store(cell, kClearFragment);
    }
  });
  return image;
}

RenderResult render_atomicmin(const PointCloud& cloud, const Camera& camera,
                              const DepthMapper& mapper, std::uint32_t background_rgb,
                              unsigned workers) {
  Framebuffer64 fb(camera.width, camera.height);
  RenderResult result;
  result.stats = rasterize_atomicmin(cloud, camera, mapper, fb, workers);
  const auto start = Clock::now();
  result.image = resolve_and_clear(fb, background_rgb, workers);
  result.stats.pass_ns[1] = ns_since(start);
  return result;
}

}  // namespace pcrast
