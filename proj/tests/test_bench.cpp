#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <tuple>
#include <vector>

#include "pcrast/baseline.hpp"
#include "pcrast/bench.hpp"
#include "pcrast/prng.hpp"
#include "pcrast/raster.hpp"
#include "pcrast/splat.hpp"

using namespace pcrast;

namespace {

std::vector<std::tuple<double, double, double, int>> sorted_multiset(const PointCloud& cloud) {
  std::vector<std::tuple<double, double, double, int>> v;
  for (const Point& p : cloud.points())
    v.emplace_back(p.position.x(), p.position.y(), p.position.z(),
                   int(p.r) << 16 | int(p.g) << 8 | p.b);
  std::sort(v.begin(), v.end());
  return v;
}

// Bit-by-bit reference for the spread function.
std::uint64_t slow_spread(std::uint32_t v) {
  std::uint64_t out = 0;
  for (int i = 0; i < 21; ++i)
    if (v >> i & 1) out |= std::uint64_t{1} << (3 * i);
  return out;
}

}  // namespace

TEST_CASE("shuffle is a deterministic permutation") {
  CHECK(shuffle_points(PointCloud{}, 5).empty());
  const PointCloud cloud = generate({SceneKind::RandomCube, 2000, 1, 10.0, 0.001, 1000.0});
  const PointCloud s1 = shuffle_points(cloud, 9);
  const PointCloud s2 = shuffle_points(cloud, 9);
  REQUIRE(s1.size() == cloud.size());
  for (std::size_t i = 0; i < s1.size(); ++i) REQUIRE(s1[i].position == s2[i].position);
  CHECK(sorted_multiset(s1) == sorted_multiset(cloud));
  // with 2000 points a different seed virtually surely moves something
  const PointCloud s3 = shuffle_points(cloud, 10);
  bool any_diff = false;
  for (std::size_t i = 0; i < s3.size() && !any_diff; ++i)
    any_diff = s3[i].position != s1[i].position;
  CHECK(any_diff);
}

TEST_CASE("morton spread matches the bit-by-bit reference") {
  SplitMix64 rng(3);
  for (int i = 0; i < 20000; ++i) {
    const std::uint32_t v = std::uint32_t(rng.next()) & 0x1FFFFF;
    REQUIRE(morton_spread21(v) == slow_spread(v));
  }
  CHECK(morton_key(0x1FFFFF, 0, 0) == 0x1249249249249249ull);
  CHECK(morton_key(0, 0x1FFFFF, 0) == 0x1249249249249249ull << 1);
}

TEST_CASE("morton sort: fixed cases") {
  CHECK(morton_sort(PointCloud{}).empty());

  PointCloud single;
  single.push_back({{3, 4, 5}, 1, 2, 3});
  const PointCloud s = morton_sort(single);
  REQUIRE(s.size() == 1);
  CHECK(s[0].position == Eigen::Vector3d(3, 4, 5));

  // Bounds corners land first and last.
  PointCloud corners;
  corners.push_back({{2, 2, 2}, 1, 1, 1});
  corners.push_back({{9, 9, 9}, 2, 2, 2});
  corners.push_back({{5, 5, 5}, 3, 3, 3});
  corners.push_back({{0, 0, 0}, 4, 4, 4});
  const PointCloud c = morton_sort(corners);
  CHECK(c[0].position == Eigen::Vector3d(0, 0, 0));
  CHECK(c[3].position == Eigen::Vector3d(9, 9, 9));
}

TEST_CASE("morton sort: the eight cube corners follow their 3-bit codes") {
  // Hand-interleaved 1-bit coordinates: code = x | y<<1 | z<<2.
  PointCloud cloud;
  for (int code = 7; code >= 0; --code) {
    cloud.push_back({{double(code & 1), double(code >> 1 & 1), double(code >> 2 & 1)},
                     std::uint8_t(code), 0, 0});
  }
  const PointCloud sorted = morton_sort(cloud);
  REQUIRE(sorted.size() == 8);
  for (int code = 0; code < 8; ++code) REQUIRE(sorted[std::size_t(code)].r == code);
}

TEST_CASE("morton sort is stable for duplicate points") {
  PointCloud cloud;
  cloud.push_back({{1, 1, 1}, 1, 0, 0});
  cloud.push_back({{0, 0, 0}, 2, 0, 0});
  cloud.push_back({{1, 1, 1}, 3, 0, 0});
  cloud.push_back({{0, 0, 0}, 4, 0, 0});
  const PointCloud sorted = morton_sort(cloud);
  CHECK(sorted[0].r == 2);
  CHECK(sorted[1].r == 4);
  CHECK(sorted[2].r == 1);
  CHECK(sorted[3].r == 3);
}

TEST_CASE("bench config parsing") {
  const BenchConfig cfg = parse_bench_config(
      "# comment\n"
      "scene = sphere-shell\n"
      "count = 1234\n"
      "seed = 9\n"
      "extent = 25\n"
      "width = 64\n"
      "height = 48\n"
      "methods = atomicmin,splat\n"
      "orderings = original,morton\n"
      "warmup = 1\n"
      "frames = 3\n"
      "workers = 2\n"
      "unit = 0.002\n"
      "epsilon = 103/100\n"
      "background = 1a2b3c\n"
      "orbit_center = 1 2 3\n"
      "orbit_radius = 40\n"
      "orbit_elevation = 15\n");
  CHECK(cfg.scene_spec.kind == SceneKind::SphereShell);
  CHECK(cfg.scene_spec.count == 1234);
  CHECK(cfg.width == 64);
  CHECK(cfg.height == 48);
  CHECK(cfg.methods == std::vector<BenchMethod>{BenchMethod::AtomicMin, BenchMethod::Splat});
  CHECK(cfg.orderings == std::vector<OrderingKind>{OrderingKind::Original, OrderingKind::Morton});
  CHECK(cfg.warmup_frames == 1);
  CHECK(cfg.measured_frames == 3);
  CHECK(cfg.eps_num == 103);
  CHECK(cfg.background == 0x1a2b3c);
  CHECK(cfg.orbit_center == Eigen::Vector3d(1, 2, 3));
  CHECK(std::get<UniformMapping>(cfg.mapper).unit() == 0.002);
}

TEST_CASE("bench config errors carry line numbers") {
  CHECK_THROWS_WITH_AS(parse_bench_config("scene random-cube\n"), doctest::Contains("line 1"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_bench_config("count = 10\nbogus = 1\n"), doctest::Contains("line 2"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_bench_config("methods = atomicmin,warp\n"),
                       doctest::Contains("unknown method"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_bench_config("frames = 0\n"), doctest::Contains("frames"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_bench_config("epsilon = 1:1\n"), doctest::Contains("epsilon"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_bench_config("count = x\n"), doctest::Contains("line 1"), ConfigError);
}

TEST_CASE("bench config accepts piecewise range rows") {
  const BenchConfig cfg = parse_bench_config("range = 0 10 1e-9\nrange = 10 10000 1e-6\n");
  const auto& m = std::get<PiecewiseMapping>(cfg.mapper);
  CHECK(m.ranges().size() == 2);
  CHECK(m.capacity() == 19990000000ull);
  CHECK_THROWS_AS(parse_bench_config("unit = 0.001\nrange = 0 10 1e-9\n"), ConfigError);
}

TEST_CASE("benchmark harness: schema, ordering invariance, output identity") {
  BenchConfig cfg;
  cfg.scene_spec = {SceneKind::RandomCube, 4000, 2, 10.0, 0.001, 1000.0};
  cfg.width = 64;
  cfg.height = 64;
  cfg.orbit_radius = 14.0;
  cfg.warmup_frames = 1;
  cfg.measured_frames = 2;
  cfg.workers = 2;

  const BenchReport report = run_benchmark(cfg);
  CHECK(report.rows.size() == 3 * 3 * 2);  // methods x orderings x frames
  for (const BenchRow& row : report.rows) {
    CHECK(row.total_ms ==
          doctest::Approx(double(row.pass_ns[0] + row.pass_ns[1] + row.pass_ns[2]) / 1e6));
    if (row.method == "splat") {
      CHECK(row.pass_ns[0] > 0);
      CHECK(row.pass_ns[1] > 0);
      CHECK(row.pass_ns[2] > 0);
    } else {
      CHECK(row.pass_ns[2] == 0);  // two-pass methods leave pass 3 empty
    }
  }
  CHECK(report.summaries.size() == 9);

  // Ordering must not change what the parallel pipelines draw.
  CHECK(report.images.at("atomicmin/original") == report.images.at("atomicmin/shuffled"));
  CHECK(report.images.at("atomicmin/original") == report.images.at("atomicmin/morton"));
  CHECK(report.images.at("splat/original") == report.images.at("splat/shuffled"));
  CHECK(report.images.at("splat/original") == report.images.at("splat/morton"));

  // Benchmarked output equals a standalone render of the same frame.
  const PointCloud cloud = generate(cfg.scene_spec);
  const Camera cam = orbit_camera(cfg, cfg.warmup_frames);
  CHECK(report.images.at("atomicmin/original") ==
        render_atomicmin(cloud, cam, cfg.mapper, cfg.background, cfg.workers).image);
  CHECK(report.images.at("splat/original") ==
        render_splat(cloud, cam, cfg.mapper, cfg.background, cfg.eps_num, cfg.eps_den, cfg.workers)
            .image);
  CHECK(report.images.at("baseline/original") ==
        render_baseline(cloud, cam, DepthMode::Standard, cfg.background).image);

  std::ostringstream csv;
  write_csv(report, csv);
  const std::string text = csv.str();
  CHECK(text.find("scene,method,ordering,frame,pass1_ns,pass2_ns,pass3_ns,total_ms,fragments\n") !=
        std::string::npos);
  CHECK(text.find("random-cube,atomicmin,original,0,") != std::string::npos);
  CHECK(text.find("random-cube,splat,morton,1,") != std::string::npos);
  CHECK(text.find("# summary,atomicmin,original,") != std::string::npos);
  CHECK(text.find("# workers=2") != std::string::npos);
}

TEST_CASE("orbit camera is deterministic and frames differ") {
  BenchConfig cfg;
  cfg.warmup_frames = 0;
  cfg.measured_frames = 4;
  const Camera a = orbit_camera(cfg, 1);
  const Camera b = orbit_camera(cfg, 1);
  CHECK(a.eye == b.eye);
  const Camera c = orbit_camera(cfg, 2);
  CHECK(a.eye != c.eye);
  CHECK_NOTHROW(a.validate());
}
