#include "pcrast/splat.hpp"

#include <atomic>
#include <cassert>
#include <chrono>
#include <stdexcept>
#include <variant>

#include "pcrast/parallel.hpp"

namespace pcrast {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t ns_since(Clock::time_point start) {
  return std::uint64_t(std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count());
}

void check_epsilon(std::uint64_t eps_num, std::uint64_t eps_den) {
  if (eps_den == 0 || eps_num < eps_den)
    throw std::invalid_argument("splat: epsilon must be a rational >= 1 (num >= den > 0)");
}

// The oracle renderer mirrors this rule with its own code; the two must
// stay in lockstep expression for expression.
bool accepts(const DepthMapper& mapper, std::uint64_t eps_num, std::uint64_t eps_den,
             std::uint64_t frag_index, std::uint64_t closest_index) {
  if (closest_index == kMaxDepthIndex) return true;  // cleared cell
  if (std::holds_alternative<UniformMapping>(mapper)) {
    return (unsigned __int128)eps_den * frag_index <= (unsigned __int128)eps_num * closest_index;
  }
  const double frag_depth = reconstruct(mapper, frag_index);
  const double closest_depth = reconstruct(mapper, closest_index);
  return frag_depth <= closest_depth * (double(eps_num) / double(eps_den));
}

}  // namespace

RenderStats splat_depth_pass(const PointCloud& cloud, const Camera& camera,
                             const DepthMapper& mapper, Framebuffer64& fb, unsigned workers) {
  return rasterize_atomicmin(cloud, camera, mapper, fb, workers);
}

RenderStats splat_accumulate(const PointCloud& cloud, const Camera& camera,
                             const DepthMapper& mapper, const Framebuffer64& fb,
                             AccumBuffer& acc, std::uint64_t eps_num, std::uint64_t eps_den,
                             unsigned workers) {
  if (fb.width() != camera.width || fb.height() != camera.height)
    throw std::invalid_argument("splat: framebuffer size does not match camera image size");
  if (acc.width() != camera.width || acc.height() != camera.height)
    throw std::invalid_argument("splat: accum buffer size does not match camera image size");
  check_epsilon(eps_num, eps_den);
  const auto start = Clock::now();
  const Projector project(camera);
  const auto& pts = cloud.points();
  const std::size_t row = std::size_t(fb.width());
  std::atomic<std::uint64_t> accepted{0};
  parallel_chunks(pts.size(), workers, [&](std::size_t lo, std::size_t hi) {
    std::uint64_t local = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      const auto hit = project(pts[i].position);
      if (!hit) continue;
      const auto index = quantize(mapper, hit->depth);
      if (!index) continue;
      const std::size_t pixel = std::size_t(hit->y) * row + std::size_t(hit->x);
      const std::uint64_t closest = fb.load(pixel) >> 24;
      if (!accepts(mapper, eps_num, eps_den, *index, closest)) continue;
      acc.add(pixel, pts[i].r, pts[i].g, pts[i].b);
      ++local;
    }
    accepted.fetch_add(local, std::memory_order_relaxed);
  });
  RenderStats stats;
  stats.points_in = pts.size();
  stats.fragments_written = accepted.load();
  stats.pass_ns[0] = ns_since(start);
  return stats;
}

ImageRGB8 splat_resolve(AccumBuffer& acc, std::uint32_t background_rgb, unsigned workers) {
  ImageRGB8 image(acc.width(), acc.height());
  parallel_chunks(acc.pixel_count(), workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t pixel = lo; pixel < hi; ++pixel) {
      const std::uint64_t n = acc.count(pixel);
      std::uint32_t rgb = background_rgb;
      if (n != 0) {
        // 255 * 2^56 < 2^64: sums cannot overflow below 2^56 fragments.
        assert(n < (std::uint64_t{1} << 56));
        const std::uint64_t r = (acc.sum_r(pixel) + n / 2) / n;
        const std::uint64_t g = (acc.sum_g(pixel) + n / 2) / n;
        const std::uint64_t b = (acc.sum_b(pixel) + n / 2) / n;
        rgb = encode_rgb(std::uint8_t(r), std::uint8_t(g), std::uint8_t(b));
      }
      image.data[pixel * 3] = std::uint8_t(rgb >> 16);
      image.data[pixel * 3 + 1] = std::uint8_t(rgb >> 8);
      image.data[pixel * 3 + 2] = std::uint8_t(rgb);
    }
  });
  acc.clear();
  return image;
}

RenderResult render_splat(const PointCloud& cloud, const Camera& camera,
                          const DepthMapper& mapper, std::uint32_t background_rgb,
                          std::uint64_t eps_num, std::uint64_t eps_den, unsigned workers) {
  camera.validate();
  Framebuffer64 fb(camera.width, camera.height);
  AccumBuffer acc(camera.width, camera.height);
  RenderResult result;
  const RenderStats depth_stats = splat_depth_pass(cloud, camera, mapper, fb, workers);
  const RenderStats accum_stats =
      splat_accumulate(cloud, camera, mapper, fb, acc, eps_num, eps_den, workers);
  const auto start = Clock::now();
  result.image = splat_resolve(acc, background_rgb, workers);
  result.stats.points_in = cloud.size();
  result.stats.fragments_written = accum_stats.fragments_written;
  result.stats.pass_ns[0] = depth_stats.pass_ns[0];
  result.stats.pass_ns[1] = accum_stats.pass_ns[0];
  result.stats.pass_ns[2] = ns_since(start);
  return result;
}

}  // namespace pcrast
