#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pcrast/core.hpp"

namespace pcrast {

// Malformed or unreadable input data. Messages carry the byte offset (LAS)
// or line number (XYZ, PLY header) of the failure.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& message) : std::runtime_error(message) {}
};

// LAS 1.2 - 1.4, point record formats 0-3 and 6-8, little endian.
// Positions decode as raw * scale + offset in double precision. 16-bit
// colors downscale to 8 bit via the high byte; colorless formats take a
// gray value from the intensity high byte. LAZ-compressed inputs are
// rejected.
PointCloud read_las(std::span<const std::uint8_t> bytes);

// PLY ascii 1.0 / binary_little_endian 1.0. Requires float or double
// vertex properties x,y,z; uses uchar red,green,blue when present, white
// otherwise.
PointCloud read_ply(std::span<const std::uint8_t> bytes);

// Plain text, one "x y z" or "x y z r g b" per line, '#' comments.
PointCloud read_xyz(std::string_view text);

std::string write_xyz(const PointCloud& cloud);   // %.17g positions: exact round trip
std::string write_ply(const PointCloud& cloud);   // binary little endian, double + uchar
std::string write_ppm(const ImageRGB8& image);    // P6, 8-bit, top row first

// Path helpers; format selected by extension (.las/.ply/.xyz, .ppm).
// "-" streams xyz from stdin / ppm to stdout.
PointCloud load_cloud(const std::string& path);
void save_cloud(const PointCloud& cloud, const std::string& path);
void save_image(const ImageRGB8& image, const std::string& path);

// ---------------------------------------------------------------------------
// Synthetic scenes (stand-ins for external LIDAR datasets). Generation is
// pinned to the splitmix64 stream so identical specs reproduce identical
// clouds everywhere.
// ---------------------------------------------------------------------------

enum class SceneKind {
  RandomCube,    // uniform points in an axis-aligned cube, random colors
  ZFightPlanes,  // two parallel quads a small separation apart, red then blue
  SphereShell,   // points on a sphere surface, random colors
};

struct SceneSpec {
  SceneKind kind = SceneKind::RandomCube;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
  double extent = 1.0;        // cube side / sphere bounding-box side / quad side (meters)
  double separation = 0.001;  // plane separation (meters)
  double distance = 1000.0;   // plane distance from the origin along -Z (meters)
};

const char* scene_kind_name(SceneKind kind);
bool scene_kind_from_name(std::string_view name, SceneKind& out);

PointCloud generate(const SceneSpec& spec);

}  // namespace pcrast
