#pragma once

#include <array>
#include <cstdint>

#include "pcrast/core.hpp"
#include "pcrast/depthmap.hpp"
#include "pcrast/framebuffer.hpp"

namespace pcrast {

struct RenderStats {
  std::uint64_t points_in = 0;
  std::uint64_t fragments_written = 0;
  std::array<std::uint64_t, 3> pass_ns{};  // unused passes stay 0

  std::uint64_t total_ns() const { return pass_ns[0] + pass_ns[1] + pass_ns[2]; }
};

struct RenderResult {
  ImageRGB8 image;
  RenderStats stats;
};

// Projects, quantizes and atomic-min-writes every point. The resulting
// buffer is bit-identical for any point order and any worker count.
// workers = 0 picks the hardware concurrency. Throws std::invalid_argument
// on a framebuffer/camera size mismatch.
RenderStats rasterize_atomicmin(const PointCloud& cloud, const Camera& camera,
                                const DepthMapper& mapper, Framebuffer64& fb,
                                unsigned workers = 0);

// Per pixel: cleared cell -> background, else the low 24 color bits. Resets
// every cell to kClearFragment afterwards.
ImageRGB8 resolve_and_clear(Framebuffer64& fb, std::uint32_t background_rgb,
                            unsigned workers = 0);

// Two-pass driver: rasterize (pass 1) then resolve-and-clear (pass 2).
RenderResult render_atomicmin(const PointCloud& cloud, const Camera& camera,
                              const DepthMapper& mapper, std::uint32_t background_rgb,
                              unsigned workers = 0);

}  // namespace pcrast
