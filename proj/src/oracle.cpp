#include "pcrast/oracle.hpp"

#include <stdexcept>
#include <variant>
#include <vector>

namespace pcrast {

ImageRGB8 oracle_closest(const PointCloud& cloud, const Camera& camera,
                         const DepthMapper& mapper, std::uint32_t background_rgb) {
  const Projector project(camera);
  struct Best {
    std::uint64_t index = 0;
    std::uint32_t rgb = 0;
    bool any = false;
  };
  std::vector<Best> best(std::size_t(camera.width) * camera.height);
  for (const Point& pt : cloud.points()) {
    const auto hit = project(pt.position);
    if (!hit) continue;
    const auto index = quantize(mapper, hit->depth);
    if (!index) continue;
    const std::uint32_t rgb = encode_rgb(pt.r, pt.g, pt.b);
    Best& b = best[std::size_t(hit->y) * camera.width + std::size_t(hit->x)];
    if (!b.any || *index < b.index || (*index == b.index && rgb < b.rgb))
      b = Best{*index, rgb, true};
  }
  ImageRGB8 image(camera.width, camera.height, background_rgb);
  for (std::size_t i = 0; i < best.size(); ++i) {
    // A fragment packing to the clear word is indistinguishable from an
    // empty cell and resolves to the background, here as in the pipeline.
    if (!best[i].any || (best[i].index == kMaxDepthIndex && best[i].rgb == 0)) continue;
    image.data[i * 3] = std::uint8_t(best[i].rgb >> 16);
    image.data[i * 3 + 1] = std::uint8_t(best[i].rgb >> 8);
    image.data[i * 3 + 2] = std::uint8_t(best[i].rgb);
  }
  return image;
}

ImageRGB8 oracle_splat(const PointCloud& cloud, const Camera& camera, const DepthMapper& mapper,
                       std::uint64_t eps_num, std::uint64_t eps_den,
                       std::uint32_t background_rgb) {
  if (eps_den == 0 || eps_num < eps_den)
    throw std::invalid_argument("oracle: epsilon must be a rational >= 1 (num >= den > 0)");
  const Projector project(camera);
  struct Frag {
    std::uint64_t index;
    std::uint8_t r, g, b;
  };
  std::vector<std::vector<Frag>> pixels(std::size_t(camera.width) * camera.height);
  for (const Point& pt : cloud.points()) {
    const auto hit = project(pt.position);
    if (!hit) continue;
    const auto index = quantize(mapper, hit->depth);
    if (!index) continue;
    pixels[std::size_t(hit->y) * camera.width + std::size_t(hit->x)].push_back(
        Frag{*index, pt.r, pt.g, pt.b});
  }
  const bool uniform = std::holds_alternative<UniformMapping>(mapper);
  ImageRGB8 image(camera.width, camera.height, background_rgb);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const auto& frags = pixels[i];
    if (frags.empty()) continue;
    std::uint64_t closest = frags.front().index;
    for (const Frag& f : frags)
      if (f.index < closest) closest = f.index;
    // Mirror of the accumulate-pass acceptance rule; must stay identical.
    std::uint64_t sum_r = 0, sum_g = 0, sum_b = 0, n = 0;
    for (const Frag& f : frags) {
      bool accept;
      if (uniform) {
        accept = (unsigned __int128)eps_den * f.index <= (unsigned __int128)eps_num * closest;
      } else {
        accept = reconstruct(mapper, f.index) <=
                 reconstruct(mapper, closest) * (double(eps_num) / double(eps_den));
      }
      if (!accept) continue;
      sum_r += f.r;
      sum_g += f.g;
      sum_b += f.b;
      ++n;
    }
    image.data[i * 3] = std::uint8_t((sum_r + n / 2) / n);
    image.data[i * 3 + 1] = std::uint8_t((sum_g + n / 2) / n);
    image.data[i * 3 + 2] = std::uint8_t((sum_b + n / 2) / n);
  }
  return image;
}

}  // namespace pcrast
