#pragma once

#include <cstdint>

#include "pcrast/raster.hpp"

namespace pcrast {

// High-quality splatting, three passes over the same inputs:
//
//   1. depth pass      - atomic-min rasterization, identical to the plain
//                        pipeline; only the depth indices are consumed.
//   2. accumulate pass - re-projects every point and sums the colors of
//                        fragments within epsilon of the pixel's closest
//                        depth, counting accepted fragments.
//   3. resolve pass    - per-pixel rounded average of the accepted colors.
//
// The epsilon is a rational eps_num/eps_den (default 101/100, i.e. accept
// fragments at most 1% behind the closest depth). Under a uniform mapping
// the test is exact integer arithmetic on depth indices; under a piecewise
// mapping it compares reconstructed lower-edge depths in double precision.

RenderStats splat_depth_pass(const PointCloud& cloud, const Camera& camera,
                             const DepthMapper& mapper, Framebuffer64& fb,
                             unsigned workers = 0);

// Requires fb to hold the completed depth pass for the same inputs and acc
// to be cleared. A fragment hitting a still-cleared cell is accepted (the
// clear word reads as the farthest possible depth).
RenderStats splat_accumulate(const PointCloud& cloud, const Camera& camera,
                             const DepthMapper& mapper, const Framebuffer64& fb,
                             AccumBuffer& acc, std::uint64_t eps_num = 101,
                             std::uint64_t eps_den = 100, unsigned workers = 0);

// count == 0 -> background; else per channel (sum + count/2) / count
// (round half up). Clears acc afterwards.
ImageRGB8 splat_resolve(AccumBuffer& acc, std::uint32_t background_rgb, unsigned workers = 0);

// Three-pass driver; stats carry one timing per pass and the accepted
// fragment count of the accumulate pass.
RenderResult render_splat(const PointCloud& cloud, const Camera& camera,
                          const DepthMapper& mapper, std::uint32_t background_rgb,
                          std::uint64_t eps_num = 101, std::uint64_t eps_den = 100,
                          unsigned workers = 0);

}  // namespace pcrast
