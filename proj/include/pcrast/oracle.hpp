#pragma once

#include <cstdint>

#include "pcrast/core.hpp"
#include "pcrast/depthmap.hpp"

namespace pcrast {

// Brute-force sequential reference renderers. They reuse the pure
// projection and quantization functions (those pin the conventions) but
// reimplement fragment selection and accumulation without atomics, threads
// or the packed framebuffer, so equality against them tests exactly the
// parallel pipeline logic.

// Ground truth for the atomic-min pipeline: per pixel, the color of the
// minimum (depth index, color) fragment, or background when empty.
ImageRGB8 oracle_closest(const PointCloud& cloud, const Camera& camera,
                         const DepthMapper& mapper, std::uint32_t background_rgb);

// Ground truth for the three-pass splat pipeline: per pixel, the rounded
// average of fragments within eps_num/eps_den of the closest depth.
ImageRGB8 oracle_splat(const PointCloud& cloud, const Camera& camera, const DepthMapper& mapper,
                       std::uint64_t eps_num, std::uint64_t eps_den,
                       std::uint32_t background_rgb);

}  // namespace pcrast
