#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pcrast/core.hpp"
#include "pcrast/depthmap.hpp"
#include "pcrast/io.hpp"

namespace pcrast {

// Invalid configuration supplied by the user (bad config file, unknown
// method, inconsistent options). Distinct from ParseError so the CLI can
// exit with the usage/config code.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

// Fisher-Yates permutation driven by splitmix64; deterministic per seed,
// multiset of points preserved.
PointCloud shuffle_points(const PointCloud& cloud, std::uint64_t seed);

// Spreads the low 21 bits so bit i lands at bit 3i.
std::uint64_t morton_spread21(std::uint32_t v);

// x in the least significant interleaved bit, then y, then z.
std::uint64_t morton_key(std::uint32_t qx, std::uint32_t qy, std::uint32_t qz);

// Quantizes each coordinate to 21 bits over the cloud bounds, interleaves
// to a 63-bit key, stable-sorts ascending.
PointCloud morton_sort(const PointCloud& cloud);

enum class BenchMethod { AtomicMin, Splat, Baseline };
enum class OrderingKind { Original, Shuffled, Morton };

const char* bench_method_name(BenchMethod m);
const char* ordering_name(OrderingKind o);

struct BenchConfig {
  std::string scene_path;  // file input; empty -> use scene_spec
  SceneSpec scene_spec{SceneKind::RandomCube, 100000, 1, 10.0, 0.001, 1000.0};
  std::string scene_label;  // defaults to the generator name / file stem

  int width = 512, height = 512;
  double fov_y_deg = 60.0;
  Eigen::Vector3d orbit_center{0, 0, 0};
  double orbit_radius = 20.0;
  double orbit_elevation_deg = 20.0;
  double near_clip = 0.1, far_clip = 10000.0;

  std::vector<BenchMethod> methods{BenchMethod::AtomicMin, BenchMethod::Splat,
                                   BenchMethod::Baseline};
  std::vector<OrderingKind> orderings{OrderingKind::Original, OrderingKind::Shuffled,
                                      OrderingKind::Morton};
  std::uint64_t shuffle_seed = 1;

  unsigned warmup_frames = 2;
  unsigned measured_frames = 1;  // must be >= 1
  unsigned workers = 0;

  DepthMapper mapper = UniformMapping(0.001);
  std::uint64_t eps_num = 101, eps_den = 100;
  std::uint32_t background = 0;
};

// Declarative key = value text, '#' comment lines; errors carry the line
// number. Keys: scene, count, seed, extent, separation, distance, width,
// height, fov, orbit_center, orbit_radius, orbit_elevation, near, far,
// methods, orderings, shuffle_seed, warmup, frames, workers, unit, range
// (repeatable), epsilon, background.
BenchConfig parse_bench_config(std::string_view text);

struct BenchRow {
  std::string scene;
  std::string method;
  std::string ordering;
  unsigned frame = 0;  // measured frame index, warmup excluded
  std::uint64_t pass_ns[3] = {0, 0, 0};
  double total_ms = 0.0;  // sum of the three passes
  std::uint64_t fragments = 0;
};

struct BenchSummary {
  std::string method;
  std::string ordering;
  double min_ms = 0.0, median_ms = 0.0, mean_ms = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<BenchSummary> summaries;
  // First measured frame per "method/ordering", for output-identity checks.
  std::map<std::string, ImageRGB8> images;
  unsigned workers = 0;
  unsigned warmup_frames = 0;
};

// Camera for frame k of the orbit (k counts warmup and measured frames).
Camera orbit_camera(const BenchConfig& config, unsigned frame);

// Renders every (method, ordering, frame) combination with per-pass wall
// timings. Rendering output is untouched by measurement.
BenchReport run_benchmark(const BenchConfig& config);

// scene,method,ordering,frame,pass1_ns,pass2_ns,pass3_ns,total_ms,fragments
// plus '#' comment lines for workers/warmup and a min/median/mean summary.
void write_csv(const BenchReport& report, std::ostream& os);

}  // namespace pcrast
