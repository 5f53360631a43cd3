// pcrast - headless point-cloud rasterizer.
//
// Subcommands: render, verify, bench, generate, info.
// Exit codes: 0 success, 1 usage/config error, 2 IO/parse error,
// 3 verification mismatch.

#include <CLI11.hpp>

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pcrast/baseline.hpp"
#include "pcrast/bench.hpp"
#include "pcrast/io.hpp"
#include "pcrast/oracle.hpp"
#include "pcrast/parallel.hpp"
#include "pcrast/raster.hpp"
#include "pcrast/splat.hpp"

namespace {

using pcrast::ConfigError;

struct Settings {
  std::string input;   // file path ("-" = xyz from stdin)
  std::string scene;   // generator name; mutually exclusive with input
  std::uint64_t count = 100000;
  std::uint64_t seed = 1;
  double extent = 10.0;
  double separation = 0.001;
  double distance = 1000.0;

  std::string output;
  std::vector<double> eye{0, 0, 0};
  std::vector<double> target{0, 0, -1};
  std::vector<double> up{0, 1, 0};
  double fov = 60.0;
  int width = 512;
  int height = 512;
  double near_clip = 0.1;
  double far_clip = 10000.0;

  std::string method = "atomicmin";
  double unit = 0.001;
  std::vector<double> ranges_flat;  // lo hi unit triples
  std::string epsilon = "101/100";
  std::string oracle_epsilon;  // verify only; defaults to epsilon
  std::string background = "000000";
  unsigned workers = 0;
  std::string config_path;
};

std::pair<std::uint64_t, std::uint64_t> parse_epsilon(const std::string& text) {
  const std::size_t slash = text.find('/');
  std::uint64_t num = 0, den = 0;
  bool ok = slash != std::string::npos;
  if (ok) {
    const auto a = std::from_chars(text.data(), text.data() + slash, num);
    const auto b = std::from_chars(text.data() + slash + 1, text.data() + text.size(), den);
    ok = a.ec == std::errc() && a.ptr == text.data() + slash && b.ec == std::errc() &&
         b.ptr == text.data() + text.size();
  }
  if (!ok || den == 0 || num < den)
    throw ConfigError("epsilon \"" + text + "\" must be num/den with num >= den > 0");
  return {num, den};
}

std::uint32_t parse_background(const std::string& text) {
  std::uint32_t bg = 0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), bg, 16);
  if (ec != std::errc() || p != text.data() + text.size() || text.size() != 6)
    throw ConfigError("background \"" + text + "\" must be 6 hex digits (RRGGBB)");
  return bg;
}

Eigen::Vector3d to_vec3(const std::vector<double>& v, const char* name) {
  if (v.size() != 3) throw ConfigError(std::string(name) + " needs exactly three numbers");
  return {v[0], v[1], v[2]};
}

// --config file: same keys as the flags, key = value lines, applied on top
// of whatever the flags set.
void apply_config_file(Settings& s, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pcrast::ParseError("cannot open \"" + path + "\"");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  const auto trim = [](const std::string& str) {
    std::size_t b = 0, e = str.size();
    while (b < e && std::isspace((unsigned char)str[b])) ++b;
    while (e > b && std::isspace((unsigned char)str[e - 1])) --e;
    return str.substr(b, e - b);
  };
  const auto num = [](const std::string& tok, std::size_t line) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
      throw ConfigError("config line " + std::to_string(line) + ": expected a number, got \"" +
                        tok + "\"");
    return v;
  };
  const auto vec3 = [&](const std::string& value, std::size_t line) {
    std::istringstream iss(value);
    std::vector<double> out;
    std::string tok;
    while (iss >> tok) out.push_back(num(tok, line));
    if (out.size() != 3)
      throw ConfigError("config line " + std::to_string(line) + ": expected three numbers");
    return out;
  };

  std::istringstream lines(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(lines, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected \"key = value\"");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");

    if (key == "input") {
      s.input = value;
      s.scene.clear();
    } else if (key == "scene") {
      s.scene = value;
      s.input.clear();
    } else if (key == "count") s.count = std::uint64_t(num(value, line_no));
    else if (key == "seed") s.seed = std::uint64_t(num(value, line_no));
    else if (key == "extent") s.extent = num(value, line_no);
    else if (key == "separation") s.separation = num(value, line_no);
    else if (key == "distance") s.distance = num(value, line_no);
    else if (key == "output") s.output = value;
    else if (key == "eye") s.eye = vec3(value, line_no);
    else if (key == "target") s.target = vec3(value, line_no);
    else if (key == "up") s.up = vec3(value, line_no);
    else if (key == "fov") s.fov = num(value, line_no);
    else if (key == "width") s.width = int(num(value, line_no));
    else if (key == "height") s.height = int(num(value, line_no));
    else if (key == "near") s.near_clip = num(value, line_no);
    else if (key == "far") s.far_clip = num(value, line_no);
    else if (key == "method") s.method = value;
    else if (key == "unit") s.unit = num(value, line_no);
    else if (key == "range") {
      std::istringstream iss(value);
      std::string tok;
      std::vector<double> f;
      while (iss >> tok) f.push_back(num(tok, line_no));
      if (f.size() != 3)
        throw ConfigError("config line " + std::to_string(line_no) + ": range needs \"lo hi unit\"");
      s.ranges_flat.insert(s.ranges_flat.end(), f.begin(), f.end());
    } else if (key == "epsilon") s.epsilon = value;
    else if (key == "background") s.background = value;
    else if (key == "workers") s.workers = unsigned(num(value, line_no));
    else
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key \"" + key + "\"");
  }
}

pcrast::PointCloud make_cloud(const Settings& s) {
  const bool has_input = !s.input.empty();
  const bool has_scene = !s.scene.empty();
  if (has_input == has_scene)
    throw ConfigError("give exactly one point source: --input FILE or --scene KIND");
  if (has_input) return pcrast::load_cloud(s.input);
  pcrast::SceneSpec spec;
  if (!pcrast::scene_kind_from_name(s.scene, spec.kind))
    throw ConfigError("unknown scene \"" + s.scene +
                      "\" (random-cube, zfight-planes, sphere-shell)");
  spec.count = s.count;
  spec.seed = s.seed;
  spec.extent = s.extent;
  spec.separation = s.separation;
  spec.distance = s.distance;
  return pcrast::generate(spec);
}

pcrast::Camera make_camera(const Settings& s) {
  pcrast::Camera cam;
  cam.eye = to_vec3(s.eye, "--eye");
  cam.target = to_vec3(s.target, "--target");
  cam.up = to_vec3(s.up, "--up");
  cam.fov_y_deg = s.fov;
  cam.width = s.width;
  cam.height = s.height;
  cam.near_clip = s.near_clip;
  cam.far_clip = s.far_clip;
  return cam;
}

pcrast::DepthMapper make_mapper(const Settings& s) {
  if (s.ranges_flat.empty()) return pcrast::UniformMapping(s.unit);
  if (s.ranges_flat.size() % 3 != 0)
    throw ConfigError("each --range needs exactly three values: lo hi unit");
  std::vector<pcrast::DepthRange> ranges;
  for (std::size_t i = 0; i + 2 < s.ranges_flat.size(); i += 3)
    ranges.push_back({s.ranges_flat[i], s.ranges_flat[i + 1], s.ranges_flat[i + 2]});
  return pcrast::PiecewiseMapping(std::move(ranges));
}

void print_stats(const pcrast::RenderStats& stats, unsigned workers, std::ostream& os) {
  char line[256];
  std::snprintf(line, sizeof line,
                "points_in: %llu\nfragments_written: %llu\npass_ms: %.3f %.3f %.3f\n"
                "total_ms: %.3f\nworkers: %u\n",
                (unsigned long long)stats.points_in, (unsigned long long)stats.fragments_written,
                double(stats.pass_ns[0]) / 1e6, double(stats.pass_ns[1]) / 1e6,
                double(stats.pass_ns[2]) / 1e6, double(stats.total_ns()) / 1e6,
                pcrast::resolve_workers(workers));
  os << line;
}

int cmd_render(Settings& s) {
  if (!s.config_path.empty()) apply_config_file(s, s.config_path);
  if (s.output.empty()) throw ConfigError("render needs --output PATH (.ppm, or - for stdout)");
  const pcrast::PointCloud cloud = make_cloud(s);
  const pcrast::Camera camera = make_camera(s);
  const std::uint32_t background = parse_background(s.background);

  pcrast::RenderResult result;
  if (s.method == "atomicmin") {
    result = pcrast::render_atomicmin(cloud, camera, make_mapper(s), background, s.workers);
  } else if (s.method == "splat") {
    const auto [num, den] = parse_epsilon(s.epsilon);
    result = pcrast::render_splat(cloud, camera, make_mapper(s), background, num, den, s.workers);
  } else if (s.method == "baseline-standard") {
    result = pcrast::render_baseline(cloud, camera, pcrast::DepthMode::Standard, background);
  } else if (s.method == "baseline-reversed") {
    result = pcrast::render_baseline(cloud, camera, pcrast::DepthMode::Reversed, background);
  } else {
    throw ConfigError("unknown method \"" + s.method +
                      "\" (atomicmin, splat, baseline-standard, baseline-reversed)");
  }
  pcrast::save_image(result.image, s.output);
  print_stats(result.stats, s.workers, s.output == "-" ? std::cerr : std::cout);
  return 0;
}

int cmd_verify(Settings& s) {
  if (!s.config_path.empty()) apply_config_file(s, s.config_path);
  const pcrast::PointCloud cloud = make_cloud(s);
  const pcrast::Camera camera = make_camera(s);
  const pcrast::DepthMapper mapper = make_mapper(s);
  const std::uint32_t background = parse_background(s.background);

  pcrast::ImageRGB8 image, reference;
  if (s.method == "atomicmin") {
    image = pcrast::render_atomicmin(cloud, camera, mapper, background, s.workers).image;
    reference = pcrast::oracle_closest(cloud, camera, mapper, background);
  } else if (s.method == "splat") {
    const auto [num, den] = parse_epsilon(s.epsilon);
    const auto [onum, oden] =
        parse_epsilon(s.oracle_epsilon.empty() ? s.epsilon : s.oracle_epsilon);
    image = pcrast::render_splat(cloud, camera, mapper, background, num, den, s.workers).image;
    reference = pcrast::oracle_splat(cloud, camera, mapper, onum, oden, background);
  } else {
    throw ConfigError("verify supports methods atomicmin and splat");
  }

  if (image == reference) {
    std::cout << "verify: " << s.method << " matches the sequential reference (" << image.width
              << "x" << image.height << ", " << cloud.size() << " points)\n";
    return 0;
  }
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      if (image.rgb(x, y) != reference.rgb(x, y)) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "verify: MISMATCH at pixel (%d, %d): pipeline #%06x reference #%06x\n", x, y,
                      image.rgb(x, y), reference.rgb(x, y));
        std::cout << msg;
        return 3;
      }
    }
  }
  std::cout << "verify: images differ in size\n";
  return 3;
}

int cmd_bench(const std::string& config_path, const std::string& output) {
  std::ifstream in(config_path);
  if (!in) throw pcrast::ParseError("cannot open \"" + config_path + "\"");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const pcrast::BenchConfig config = pcrast::parse_bench_config(text);
  const pcrast::BenchReport report = pcrast::run_benchmark(config);
  if (output == "-") {
    pcrast::write_csv(report, std::cout);
  } else {
    std::ofstream out(output);
    if (!out) throw pcrast::ParseError("cannot write \"" + output + "\"");
    pcrast::write_csv(report, out);
    std::cout << "bench: " << report.rows.size() << " rows -> " << output << "\n";
  }
  return 0;
}

int cmd_generate(Settings& s, const std::string& output) {
  pcrast::SceneSpec spec;
  if (s.scene.empty()) throw ConfigError("generate needs --scene KIND");
  if (!pcrast::scene_kind_from_name(s.scene, spec.kind))
    throw ConfigError("unknown scene \"" + s.scene +
                      "\" (random-cube, zfight-planes, sphere-shell)");
  spec.count = s.count;
  spec.seed = s.seed;
  spec.extent = s.extent;
  spec.separation = s.separation;
  spec.distance = s.distance;
  const std::string ext = output.size() >= 4 ? output.substr(output.size() - 4) : "";
  if (ext != ".xyz" && ext != ".ply")
    throw ConfigError("unsupported output extension for generate (writers: .xyz, .ply)");
  const pcrast::PointCloud cloud = pcrast::generate(spec);
  pcrast::save_cloud(cloud, output);
  std::cout << "generate: " << cloud.size() << " points (" << s.scene << ", seed " << s.seed
            << ") -> " << output << "\n";
  return 0;
}

int cmd_info(const std::string& input) {
  const pcrast::PointCloud cloud = pcrast::load_cloud(input);
  std::cout << "points: " << cloud.size() << "\n";
  if (!cloud.empty()) {
    const auto& box = cloud.bounds();
    char line[256];
    std::snprintf(line, sizeof line, "bounds_min: %.17g %.17g %.17g\nbounds_max: %.17g %.17g %.17g\n",
                  box.min().x(), box.min().y(), box.min().z(), box.max().x(), box.max().y(),
                  box.max().z());
    std::cout << line;
  }
  return 0;
}

void add_scene_options(CLI::App* cmd, Settings& s) {
  cmd->add_option("--scene", s.scene, "generator: random-cube, zfight-planes, sphere-shell");
  cmd->add_option("--count", s.count, "generated point count");
  cmd->add_option("--seed", s.seed, "generator seed");
  cmd->add_option("--extent", s.extent, "cube side / quad side / sphere bounding side (m)");
  cmd->add_option("--separation", s.separation, "zfight plane separation (m)");
  cmd->add_option("--distance", s.distance, "zfight plane distance from origin (m)");
}

void add_render_options(CLI::App* cmd, Settings& s, bool with_output) {
  cmd->add_option("--input", s.input, "point cloud file (.las, .ply, .xyz; - = xyz stdin)");
  add_scene_options(cmd, s);
  if (with_output) cmd->add_option("-o,--output", s.output, "output image (.ppm; - = stdout)");
  cmd->add_option("--eye", s.eye, "camera position")->type_size(3);
  cmd->add_option("--target", s.target, "look-at point")->type_size(3);
  cmd->add_option("--up", s.up, "up vector")->type_size(3);
  cmd->add_option("--fov", s.fov, "vertical field of view (degrees)");
  cmd->add_option("--width", s.width, "image width");
  cmd->add_option("--height", s.height, "image height");
  cmd->add_option("--near", s.near_clip, "near clip (baseline methods)");
  cmd->add_option("--far", s.far_clip, "far clip (baseline methods)");
  cmd->add_option("--unit", s.unit, "uniform depth step in meters (default 0.001)");
  cmd->add_option("--range", s.ranges_flat, "piecewise depth range: lo hi unit (repeatable)")
      ->type_size(3);
  cmd->add_option("--epsilon", s.epsilon, "splat depth tolerance as num/den (default 101/100)");
  cmd->add_option("--background", s.background, "background color, RRGGBB hex");
  cmd->add_option("--workers", s.workers, "worker threads (0 = hardware)");
  cmd->add_option("--config", s.config_path, "key = value config file; overrides flags");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pcrast: headless point-cloud rasterizer with a 40-bit depth pipeline"};
  app.require_subcommand(1);

  Settings s;
  std::string bench_config, bench_output = "-", generate_output, info_input;

  CLI::App* render = app.add_subcommand("render", "render a cloud to a PPM image");
  add_render_options(render, s, true);
  render->add_option("--method", s.method,
                     "atomicmin | splat | baseline-standard | baseline-reversed");

  CLI::App* verify = app.add_subcommand("verify", "compare the parallel pipeline to the reference");
  add_render_options(verify, s, false);
  verify->add_option("--method", s.method, "atomicmin | splat");
  verify->add_option("--oracle-epsilon", s.oracle_epsilon,
                     "override the reference epsilon (negative-control testing)");

  CLI::App* bench = app.add_subcommand("bench", "run the benchmark harness");
  bench->add_option("config", bench_config, "benchmark config file")->required();
  bench->add_option("-o,--output", bench_output, "CSV output path (- = stdout)");

  CLI::App* generate = app.add_subcommand("generate", "write a synthetic cloud to .xyz/.ply");
  add_scene_options(generate, s);
  generate->add_option("output", generate_output, "output file (.xyz or .ply)")->required();

  CLI::App* info = app.add_subcommand("info", "print point count and bounds");
  info->add_option("input", info_input, "point cloud file")->required();

  try {
    app.parse(argc, argv);
    if (app.got_subcommand(render)) return cmd_render(s);
    if (app.got_subcommand(verify)) return cmd_verify(s);
    if (app.got_subcommand(bench)) return cmd_bench(bench_config, bench_output);
    if (app.got_subcommand(generate)) return cmd_generate(s, generate_output);
    if (app.got_subcommand(info)) return cmd_info(info_input);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const pcrast::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
