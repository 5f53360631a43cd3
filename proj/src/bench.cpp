#include "pcrast/bench.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <sstream>

#include "pcrast/baseline.hpp"
#include "pcrast/prng.hpp"
#include "pcrast/raster.hpp"
#include "pcrast/splat.hpp"

namespace pcrast {

PointCloud shuffle_points(const PointCloud& cloud, std::uint64_t seed) {
  std::vector<Point> pts = cloud.points();
  SplitMix64 rng(seed);
  for (std::size_t i = pts.size(); i > 1; --i) {
    const std::size_t j = std::size_t(rng.next() % i);
    std::swap(pts[i - 1], pts[j]);
  }
  return PointCloud(std::move(pts));
}

std::uint64_t morton_spread21(std::uint32_t v) {
  std::uint64_t x = v & 0x1FFFFF;
  x = (x | x << 32) & 0x1F00000000FFFFull;
  x = (x | x << 16) & 0x1F0000FF0000FFull;
  x = (x | x << 8) & 0x100F00F00F00F00Full;
  x = (x | x << 4) & 0x10C30C30C30C30C3ull;
  x = (x | x << 2) & 0x1249249249249249ull;
  return x;
}

std::uint64_t morton_key(std::uint32_t qx, std::uint32_t qy, std::uint32_t qz) {
  return morton_spread21(qx) | morton_spread21(qy) << 1 | morton_spread21(qz) << 2;
}

PointCloud morton_sort(const PointCloud& cloud) {
  if (cloud.empty()) return cloud;
  const Eigen::AlignedBox3d box = cloud.bounds();
  const auto quantize_axis = [](double v, double lo, double hi) -> std::uint32_t {
    if (!(hi > lo)) return 0;
    const double t = (v - lo) / (hi - lo);
    const double q = std::floor(t * 2097152.0);  // 2^21
    if (q <= 0.0) return 0;
    if (q >= 2097151.0) return 2097151;
    return std::uint32_t(q);
  };
  std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Eigen::Vector3d& p = cloud[i].position;
    keyed[i] = {morton_key(quantize_axis(p.x(), box.min().x(), box.max().x()),
                           quantize_axis(p.y(), box.min().y(), box.max().y()),
                           quantize_axis(p.z(), box.min().z(), box.max().z())),
                std::uint32_t(i)};
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Point> pts;
  pts.reserve(cloud.size());
  for (const auto& [key, idx] : keyed) pts.push_back(cloud[idx]);
  return PointCloud(std::move(pts));
}

const char* bench_method_name(BenchMethod m) {
  switch (m) {
    case BenchMethod::AtomicMin: return "atomicmin";
    case BenchMethod::Splat: return "splat";
    case BenchMethod::Baseline: return "baseline";
  }
  return "?";
}

const char* ordering_name(OrderingKind o) {
  switch (o) {
    case OrderingKind::Original: return "original";
    case OrderingKind::Shuffled: return "shuffled";
    case OrderingKind::Morton: return "morton";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void config_fail(std::size_t line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double parse_num(const std::string& tok, std::size_t line) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    config_fail(line, "expected a number, got \"" + tok + "\"");
  return v;
}

std::uint64_t parse_u64(const std::string& tok, std::size_t line) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    config_fail(line, "expected a non-negative integer, got \"" + tok + "\"");
  return v;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : value) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace((unsigned char)c)) {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<std::string> split_fields(const std::string& value) {
  std::vector<std::string> out;
  std::istringstream in(value);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace((unsigned char)s[b])) ++b;
  while (e > b && std::isspace((unsigned char)s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

BenchConfig parse_bench_config(std::string_view text) {
  BenchConfig cfg;
  std::vector<DepthRange> ranges;
  bool unit_set = false;
  std::size_t line_no = 0;
  std::size_t cursor = 0;
  while (cursor < text.size()) {
    std::size_t eol = text.find('\n', cursor);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string line = trim(text.substr(cursor, eol - cursor));
    cursor = eol < text.size() ? eol + 1 : eol;
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) config_fail(line_no, "expected \"key = value\"");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) config_fail(line_no, "empty key");
    if (value.empty()) config_fail(line_no, "empty value for \"" + key + "\"");

    if (key == "scene") {
      SceneKind kind;
      if (scene_kind_from_name(value, kind)) {
        cfg.scene_spec.kind = kind;
        cfg.scene_path.clear();
      } else {
        cfg.scene_path = value;
      }
    } else if (key == "label") {
      cfg.scene_label = value;
    } else if (key == "count") {
      cfg.scene_spec.count = parse_u64(value, line_no);
    } else if (key == "seed") {
      cfg.scene_spec.seed = parse_u64(value, line_no);
    } else if (key == "extent") {
      cfg.scene_spec.extent = parse_num(value, line_no);
    } else if (key == "separation") {
      cfg.scene_spec.separation = parse_num(value, line_no);
    } else if (key == "distance") {
      cfg.scene_spec.distance = parse_num(value, line_no);
    } else if (key == "width") {
      cfg.width = int(parse_u64(value, line_no));
    } else if (key == "height") {
      cfg.height = int(parse_u64(value, line_no));
    } else if (key == "fov") {
      cfg.fov_y_deg = parse_num(value, line_no);
    } else if (key == "orbit_center") {
      const auto f = split_fields(value);
      if (f.size() != 3) config_fail(line_no, "orbit_center needs three numbers");
      cfg.orbit_center = {parse_num(f[0], line_no), parse_num(f[1], line_no),
                          parse_num(f[2], line_no)};
    } else if (key == "orbit_radius") {
      cfg.orbit_radius = parse_num(value, line_no);
    } else if (key == "orbit_elevation") {
      cfg.orbit_elevation_deg = parse_num(value, line_no);
    } else if (key == "near") {
      cfg.near_clip = parse_num(value, line_no);
    } else if (key == "far") {
      cfg.far_clip = parse_num(value, line_no);
    } else if (key == "methods") {
      cfg.methods.clear();
      for (const std::string& m : split_list(value)) {
        if (m == "atomicmin") cfg.methods.push_back(BenchMethod::AtomicMin);
        else if (m == "splat") cfg.methods.push_back(BenchMethod::Splat);
        else if (m == "baseline") cfg.methods.push_back(BenchMethod::Baseline);
        else config_fail(line_no, "unknown method \"" + m + "\"");
      }
      if (cfg.methods.empty()) config_fail(line_no, "methods list is empty");
    } else if (key == "orderings") {
      cfg.orderings.clear();
      for (const std::string& o : split_list(value)) {
        if (o == "original") cfg.orderings.push_back(OrderingKind::Original);
        else if (o == "shuffled") cfg.orderings.push_back(OrderingKind::Shuffled);
        else if (o == "morton") cfg.orderings.push_back(OrderingKind::Morton);
        else config_fail(line_no, "unknown ordering \"" + o + "\"");
      }
      if (cfg.orderings.empty()) config_fail(line_no, "orderings list is empty");
    } else if (key == "shuffle_seed") {
      cfg.shuffle_seed = parse_u64(value, line_no);
    } else if (key == "warmup") {
      cfg.warmup_frames = unsigned(parse_u64(value, line_no));
    } else if (key == "frames") {
      cfg.measured_frames = unsigned(parse_u64(value, line_no));
    } else if (key == "workers") {
      cfg.workers = unsigned(parse_u64(value, line_no));
    } else if (key == "unit") {
      const double unit = parse_num(value, line_no);
      try {
        cfg.mapper = UniformMapping(unit);
      } catch (const std::invalid_argument& e) {
        config_fail(line_no, e.what());
      }
      unit_set = true;
    } else if (key == "range") {
      const auto f = split_fields(value);
      if (f.size() != 3) config_fail(line_no, "range needs \"lo hi unit\"");
      ranges.push_back(
          {parse_num(f[0], line_no), parse_num(f[1], line_no), parse_num(f[2], line_no)});
    } else if (key == "epsilon") {
      const std::size_t slash = value.find('/');
      if (slash == std::string::npos) config_fail(line_no, "epsilon must be \"num/den\"");
      cfg.eps_num = parse_u64(trim(value.substr(0, slash)), line_no);
      cfg.eps_den = parse_u64(trim(value.substr(slash + 1)), line_no);
      if (cfg.eps_den == 0 || cfg.eps_num < cfg.eps_den)
        config_fail(line_no, "epsilon must be >= 1 (num >= den > 0)");
    } else if (key == "background") {
      std::uint32_t bg = 0;
      const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), bg, 16);
      if (ec != std::errc() || p != value.data() + value.size() || bg > 0xFFFFFF)
        config_fail(line_no, "background must be RRGGBB hex");
      cfg.background = bg;
    } else {
      config_fail(line_no, "unknown key \"" + key + "\"");
    }
  }
  if (!ranges.empty()) {
    if (unit_set) throw ConfigError("config: give either \"unit\" or \"range\" rows, not both");
    try {
      cfg.mapper = PiecewiseMapping(std::move(ranges));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
  if (cfg.measured_frames < 1) throw ConfigError("config: frames must be >= 1");
  if (cfg.width < 1 || cfg.height < 1) throw ConfigError("config: image size must be at least 1x1");
  return cfg;
}

// ---------------------------------------------------------------------------
// Harness
// ---------------------------------------------------------------------------

Camera orbit_camera(const BenchConfig& config, unsigned frame) {
  const unsigned total = config.warmup_frames + config.measured_frames;
  const double azimuth = 2.0 * std::numbers::pi * double(frame) / double(std::max(total, 1u));
  const double elevation = config.orbit_elevation_deg * std::numbers::pi / 180.0;
  const Eigen::Vector3d dir(std::cos(elevation) * std::cos(azimuth), std::sin(elevation),
                            std::cos(elevation) * std::sin(azimuth));
  Camera cam;
  cam.eye = config.orbit_center + config.orbit_radius * dir;
  cam.target = config.orbit_center;
  cam.up = {0, 1, 0};
  cam.fov_y_deg = config.fov_y_deg;
  cam.width = config.width;
  cam.height = config.height;
  cam.near_clip = config.near_clip;
  cam.far_clip = config.far_clip;
  return cam;
}

namespace {

std::string scene_label(const BenchConfig& cfg) {
  if (!cfg.scene_label.empty()) return cfg.scene_label;
  if (cfg.scene_path.empty()) return scene_kind_name(cfg.scene_spec.kind);
  std::size_t slash = cfg.scene_path.find_last_of("/\\");
  std::string stem = slash == std::string::npos ? cfg.scene_path : cfg.scene_path.substr(slash + 1);
  const std::size_t dot = stem.rfind('.');
  if (dot != std::string::npos) stem = stem.substr(0, dot);
  return stem;
}

}  // namespace

BenchReport run_benchmark(const BenchConfig& config) {
  if (config.measured_frames < 1) throw ConfigError("benchmark: frames must be >= 1");
  const PointCloud original =
      config.scene_path.empty() ? generate(config.scene_spec) : load_cloud(config.scene_path);

  BenchReport report;
  report.workers = config.workers;
  report.warmup_frames = config.warmup_frames;
  const std::string label = scene_label(config);
  const unsigned total_frames = config.warmup_frames + config.measured_frames;

  for (const BenchMethod method : config.methods) {
    for (const OrderingKind ordering : config.orderings) {
      const PointCloud* cloud = &original;
      PointCloud reordered;
      if (ordering == OrderingKind::Shuffled) {
        reordered = shuffle_points(original, config.shuffle_seed);
        cloud = &reordered;
      } else if (ordering == OrderingKind::Morton) {
        reordered = morton_sort(original);
        cloud = &reordered;
      }
      for (unsigned frame = 0; frame < total_frames; ++frame) {
        const Camera camera = orbit_camera(config, frame);
        RenderResult result;
        switch (method) {
          case BenchMethod::AtomicMin:
            result = render_atomicmin(*cloud, camera, config.mapper, config.background,
                                      config.workers);
            break;
          case BenchMethod::Splat:
            result = render_splat(*cloud, camera, config.mapper, config.background,
                                  config.eps_num, config.eps_den, config.workers);
            break;
          case BenchMethod::Baseline:
            result = render_baseline(*cloud, camera, DepthMode::Standard, config.background);
            break;
        }
        if (frame < config.warmup_frames) continue;
        BenchRow row;
        row.scene = label;
        row.method = bench_method_name(method);
        row.ordering = ordering_name(ordering);
        row.frame = frame - config.warmup_frames;
        row.pass_ns[0] = result.stats.pass_ns[0];
        row.pass_ns[1] = result.stats.pass_ns[1];
        row.pass_ns[2] = result.stats.pass_ns[2];
        row.total_ms = double(result.stats.total_ns()) / 1e6;
        row.fragments = result.stats.fragments_written;
        report.rows.push_back(row);
        if (frame == config.warmup_frames) {
          report.images.emplace(row.method + "/" + row.ordering, std::move(result.image));
        }
      }
    }
  }

  // min / median / mean of total_ms per (method, ordering)
  for (const BenchMethod method : config.methods) {
    for (const OrderingKind ordering : config.orderings) {
      std::vector<double> totals;
      for (const BenchRow& row : report.rows)
        if (row.method == bench_method_name(method) && row.ordering == ordering_name(ordering))
          totals.push_back(row.total_ms);
      if (totals.empty()) continue;
      std::sort(totals.begin(), totals.end());
      BenchSummary s;
      s.method = bench_method_name(method);
      s.ordering = ordering_name(ordering);
      s.min_ms = totals.front();
      s.median_ms = totals.size() % 2 == 1
                        ? totals[totals.size() / 2]
                        : (totals[totals.size() / 2 - 1] + totals[totals.size() / 2]) / 2.0;
      s.mean_ms = std::accumulate(totals.begin(), totals.end(), 0.0) / double(totals.size());
      report.summaries.push_back(s);
    }
  }
  return report;
}

void write_csv(const BenchReport& report, std::ostream& os) {
  os << "# workers=" << report.workers << " warmup=" << report.warmup_frames << "\n";
  os << "scene,method,ordering,frame,pass1_ns,pass2_ns,pass3_ns,total_ms,fragments\n";
  char buf[64];
  for (const BenchRow& row : report.rows) {
    std::snprintf(buf, sizeof buf, "%.6f", row.total_ms);
    os << row.scene << ',' << row.method << ',' << row.ordering << ',' << row.frame << ','
       << row.pass_ns[0] << ',' << row.pass_ns[1] << ',' << row.pass_ns[2] << ',' << buf << ','
       << row.fragments << "\n";
  }
  os << "# summary,method,ordering,min_ms,median_ms,mean_ms\n";
  for (const BenchSummary& s : report.summaries) {
    char mn[64], md[64], me[64];
    std::snprintf(mn, sizeof mn, "%.6f", s.min_ms);
    std::snprintf(md, sizeof md, "%.6f", s.median_ms);
    std::snprintf(me, sizeof me, "%.6f", s.mean_ms);
    os << "# summary," << s.method << ',' << s.ordering << ',' << mn << ',' << md << ',' << me
       << "\n";
  }
}

}  // namespace pcrast
