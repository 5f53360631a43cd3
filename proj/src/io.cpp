#include "pcrast/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <iterator>
#include <numbers>
#include <sstream>
#include <vector>

#include "pcrast/prng.hpp"

namespace pcrast {

namespace {

[[noreturn]] void fail(const std::string& message) { throw ParseError(message); }

std::uint16_t le16(std::span<const std::uint8_t> b, std::size_t off) {
  return std::uint16_t(b[off] | b[off + 1] << 8);
}

std::uint32_t le32(std::span<const std::uint8_t> b, std::size_t off) {
  return std::uint32_t(b[off]) | std::uint32_t(b[off + 1]) << 8 | std::uint32_t(b[off + 2]) << 16 |
         std::uint32_t(b[off + 3]) << 24;
}

std::uint64_t le64(std::span<const std::uint8_t> b, std::size_t off) {
  return std::uint64_t(le32(b, off)) | std::uint64_t(le32(b, off + 4)) << 32;
}

std::int32_t le_i32(std::span<const std::uint8_t> b, std::size_t off) {
  return std::bit_cast<std::int32_t>(le32(b, off));
}

double le_f64(std::span<const std::uint8_t> b, std::size_t off) {
  return std::bit_cast<double>(le64(b, off));
}

float le_f32(std::span<const std::uint8_t> b, std::size_t off) {
  return std::bit_cast<float>(le32(b, off));
}

}  // namespace

// ---------------------------------------------------------------------------
// LAS
// ---------------------------------------------------------------------------

PointCloud read_las(std::span<const std::uint8_t> bytes) {
  const auto las_fail = [](const std::string& msg, std::size_t at) {
    fail("las: " + msg + " at byte " + std::to_string(at));
  };
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "LASF", 4) != 0)
    las_fail("bad signature (expected \"LASF\")", 0);
  if (bytes.size() < 227) las_fail("header truncated", bytes.size());

  const int version_major = bytes[24];
  const int version_minor = bytes[25];
  const std::uint16_t header_size = le16(bytes, 94);
  const std::uint32_t point_offset = le32(bytes, 96);
  const std::uint8_t format = bytes[104];
  const std::uint16_t record_length = le16(bytes, 105);
  std::uint64_t count = le32(bytes, 107);

  if (format & 0x80) las_fail("compressed (LAZ) point data is not supported", 104);

  std::size_t min_length = 0;
  switch (format) {
    case 0: min_length = 20; break;
    case 1: min_length = 28; break;
    case 2: min_length = 26; break;
    case 3: min_length = 34; break;
    case 6: min_length = 30; break;
    case 7: min_length = 36; break;
    case 8: min_length = 38; break;
    default:
      las_fail("unsupported point record format " + std::to_string(int(format)), 104);
  }
  if (record_length < min_length)
    las_fail("point record length " + std::to_string(record_length) + " too small for format " +
                 std::to_string(int(format)),
             105);

  const double scale_x = le_f64(bytes, 131), scale_y = le_f64(bytes, 139), scale_z = le_f64(bytes, 147);
  const double off_x = le_f64(bytes, 155), off_y = le_f64(bytes, 163), off_z = le_f64(bytes, 171);
  if (!std::isfinite(scale_x) || !std::isfinite(scale_y) || !std::isfinite(scale_z) ||
      !std::isfinite(off_x) || !std::isfinite(off_y) || !std::isfinite(off_z))
    las_fail("non-finite scale or offset in header", 131);

  if (version_major == 1 && version_minor >= 4) {
    if (header_size < 375 || bytes.size() < 375) las_fail("1.4 header truncated", bytes.size());
    const std::uint64_t count64 = le64(bytes, 247);
    if (count64 != 0) count = count64;
  }

  if (point_offset > bytes.size()) las_fail("point data offset past end of file", 96);

  const std::size_t stride = record_length;
  const std::size_t available = (bytes.size() - point_offset) / std::max<std::size_t>(stride, 1);
  if (available < count)
    las_fail("truncated point records: header declares " + std::to_string(count) + ", file holds " +
                 std::to_string(available),
             point_offset + available * stride);

  std::size_t rgb_offset = 0;  // 0 = no color fields for this format
  switch (format) {
    case 2: rgb_offset = 20; break;
    case 3: rgb_offset = 28; break;
    case 7:
    case 8: rgb_offset = 30; break;
    default: break;
  }

  PointCloud cloud;
  cloud.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t at = point_offset + std::size_t(i) * stride;
    Point p;
    p.position.x() = double(le_i32(bytes, at)) * scale_x + off_x;
    p.position.y() = double(le_i32(bytes, at + 4)) * scale_y + off_y;
    p.position.z() = double(le_i32(bytes, at + 8)) * scale_z + off_z;
    if (!p.position.allFinite()) las_fail("non-finite point position (record " + std::to_string(i) + ")", at);
    if (rgb_offset != 0) {
      p.r = std::uint8_t(le16(bytes, at + rgb_offset) >> 8);
      p.g = std::uint8_t(le16(bytes, at + rgb_offset + 2) >> 8);
      p.b = std::uint8_t(le16(bytes, at + rgb_offset + 4) >> 8);
    } else {
      const std::uint8_t gray = std::uint8_t(le16(bytes, at + 12) >> 8);
      p.r = p.g = p.b = gray;
    }
    cloud.push_back(p);
  }
  return cloud;
}

// ---------------------------------------------------------------------------
// PLY
// ---------------------------------------------------------------------------

namespace {

struct PlyProp {
  std::string name;
  std::string type;
  bool is_list = false;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProp> props;
};

std::size_t ply_type_size(const std::string& t) {
  if (t == "char" || t == "int8" || t == "uchar" || t == "uint8") return 1;
  if (t == "short" || t == "int16" || t == "ushort" || t == "uint16") return 2;
  if (t == "int" || t == "int32" || t == "uint" || t == "uint32" || t == "float" || t == "float32")
    return 4;
  if (t == "double" || t == "float64") return 8;
  return 0;
}

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace((unsigned char)line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace((unsigned char)line[j])) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double_token(const std::string& tok, const std::string& where) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    fail(where + ": non-numeric token \"" + tok + "\"");
  return v;
}

std::uint8_t parse_color_token(const std::string& tok, const std::string& where) {
  int v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    fail(where + ": non-numeric token \"" + tok + "\"");
  if (v < 0 || v > 255) fail(where + ": color value " + tok + " out of range [0,255]");
  return std::uint8_t(v);
}

}  // namespace

PointCloud read_ply(std::span<const std::uint8_t> bytes) {
  std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());

  // Header is line-oriented text up to and including the end_header line.
  std::vector<std::string> header_lines;
  std::size_t cursor = 0;
  bool header_done = false;
  while (cursor < text.size()) {
    std::size_t eol = text.find('\n', cursor);
    if (eol == std::string_view::npos) eol = text.size();
    std::string line(text.substr(cursor, eol - cursor));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    cursor = eol < text.size() ? eol + 1 : eol;
    header_lines.push_back(line);
    if (line == "end_header") {
      header_done = true;
      break;
    }
  }
  if (header_lines.empty() || split_ws(header_lines[0]) != std::vector<std::string>{"ply"})
    fail("ply: missing \"ply\" magic on line 1");
  if (!header_done) fail("ply: missing end_header");

  bool ascii = false;
  bool have_format = false;
  std::vector<PlyElement> elements;
  for (std::size_t li = 1; li + 1 < header_lines.size(); ++li) {
    const auto tok = split_ws(header_lines[li]);
    if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") continue;
    const std::string where = "ply: line " + std::to_string(li + 1);
    if (tok[0] == "format") {
      if (tok.size() != 3 || (tok[1] != "ascii" && tok[1] != "binary_little_endian") || tok[2] != "1.0")
        fail(where + ": unsupported format \"" + header_lines[li] + "\"");
      ascii = tok[1] == "ascii";
      have_format = true;
    } else if (tok[0] == "element") {
      if (tok.size() != 3) fail(where + ": malformed element declaration");
      PlyElement e;
      e.name = tok[1];
      e.count = std::size_t(parse_double_token(tok[2], where));
      elements.push_back(e);
    } else if (tok[0] == "property") {
      if (elements.empty()) fail(where + ": property before any element");
      PlyProp p;
      if (tok.size() == 5 && tok[1] == "list") {
        p.is_list = true;
        p.name = tok[4];
      } else if (tok.size() == 3) {
        p.type = tok[1];
        p.name = tok[2];
        if (ply_type_size(p.type) == 0) fail(where + ": unknown property type \"" + p.type + "\"");
      } else {
        fail(where + ": malformed property declaration");
      }
      elements.back().props.push_back(p);
    } else {
      fail(where + ": unknown header keyword \"" + tok[0] + "\"");
    }
  }
  if (!have_format) fail("ply: missing format line");

  const PlyElement* vertex = nullptr;
  std::size_t vertex_pos = 0;
  for (std::size_t i = 0; i < elements.size(); ++i)
    if (elements[i].name == "vertex") {
      vertex = &elements[i];
      vertex_pos = i;
      break;
    }
  if (!vertex) fail("ply: no vertex element");

  int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1;
  for (std::size_t i = 0; i < vertex->props.size(); ++i) {
    const PlyProp& p = vertex->props[i];
    if (p.is_list) fail("ply: list property in vertex element is not supported");
    const bool fp = p.type == "float" || p.type == "float32" || p.type == "double" || p.type == "float64";
    const bool u8 = p.type == "uchar" || p.type == "uint8";
    if (p.name == "x" && fp) ix = int(i);
    if (p.name == "y" && fp) iy = int(i);
    if (p.name == "z" && fp) iz = int(i);
    if (p.name == "red" && u8) ir = int(i);
    if (p.name == "green" && u8) ig = int(i);
    if (p.name == "blue" && u8) ib = int(i);
  }
  if (ix < 0 || iy < 0 || iz < 0)
    fail("ply: vertex element is missing float/double x, y, z properties");
  const bool has_color = ir >= 0 && ig >= 0 && ib >= 0;

  PointCloud cloud;
  cloud.reserve(vertex->count);

  if (ascii) {
    // One body line per element instance, in declaration order.
    std::vector<std::string> body;
    while (cursor <= text.size()) {
      if (cursor >= text.size()) break;
      std::size_t eol = text.find('\n', cursor);
      if (eol == std::string_view::npos) eol = text.size();
      std::string line(text.substr(cursor, eol - cursor));
      if (!line.empty() && line.back() == '\r') line.pop_back();
      cursor = eol < text.size() ? eol + 1 : eol;
      if (!split_ws(line).empty()) body.push_back(line);
    }
    std::size_t row = 0;
    for (std::size_t ei = 0; ei < elements.size(); ++ei) {
      if (ei == vertex_pos) break;
      row += elements[ei].count;  // skip preceding elements
    }
    for (std::size_t v = 0; v < vertex->count; ++v, ++row) {
      if (row >= body.size())
        fail("ply: vertex count mismatch: header declares " + std::to_string(vertex->count) +
             ", body holds " + std::to_string(v));
      const auto tok = split_ws(body[row]);
      const std::string where = "ply: vertex " + std::to_string(v);
      if (tok.size() != vertex->props.size())
        fail(where + ": expected " + std::to_string(vertex->props.size()) + " values, got " +
             std::to_string(tok.size()));
      Point p;
      p.position.x() = parse_double_token(tok[ix], where);
      p.position.y() = parse_double_token(tok[iy], where);
      p.position.z() = parse_double_token(tok[iz], where);
      if (!p.position.allFinite()) fail(where + ": non-finite coordinate");
      if (has_color) {
        p.r = parse_color_token(tok[ir], where);
        p.g = parse_color_token(tok[ig], where);
        p.b = parse_color_token(tok[ib], where);
      } else {
        p.r = p.g = p.b = 255;
      }
      cloud.push_back(p);
    }
    return cloud;
  }

  // Binary little endian. Elements are laid out in declaration order; any
  // element before vertex must be fixed-stride to be skippable.
  std::size_t at = cursor;
  for (std::size_t ei = 0; ei < vertex_pos; ++ei) {
    std::size_t stride = 0;
    for (const PlyProp& p : elements[ei].props) {
      if (p.is_list)
        fail("ply: cannot skip list-typed element \"" + elements[ei].name + "\" before vertex data");
      stride += ply_type_size(p.type);
    }
    at += stride * elements[ei].count;
  }
  std::vector<std::size_t> offsets(vertex->props.size());
  std::size_t stride = 0;
  for (std::size_t i = 0; i < vertex->props.size(); ++i) {
    offsets[i] = stride;
    stride += ply_type_size(vertex->props[i].type);
  }
  const auto read_fp = [&](std::size_t base, int prop) {
    const std::size_t o = base + offsets[prop];
    const std::string& t = vertex->props[prop].type;
    return (t == "float" || t == "float32") ? double(le_f32(bytes, o)) : le_f64(bytes, o);
  };
  for (std::size_t v = 0; v < vertex->count; ++v) {
    const std::size_t base = at + v * stride;
    if (base + stride > bytes.size())
      fail("ply: vertex count mismatch: header declares " + std::to_string(vertex->count) +
           ", body holds " + std::to_string(v));
    Point p;
    p.position.x() = read_fp(base, ix);
    p.position.y() = read_fp(base, iy);
    p.position.z() = read_fp(base, iz);
    if (!p.position.allFinite()) fail("ply: vertex " + std::to_string(v) + ": non-finite coordinate");
    if (has_color) {
      p.r = bytes[base + offsets[ir]];
      p.g = bytes[base + offsets[ig]];
      p.b = bytes[base + offsets[ib]];
    } else {
      p.r = p.g = p.b = 255;
    }
    cloud.push_back(p);
  }
  return cloud;
}

// ---------------------------------------------------------------------------
// XYZ text
// ---------------------------------------------------------------------------

PointCloud read_xyz(std::string_view text) {
  PointCloud cloud;
  std::size_t line_no = 0;
  std::size_t cursor = 0;
  while (cursor <= text.size()) {
    if (cursor >= text.size()) break;
    std::size_t eol = text.find('\n', cursor);
    if (eol == std::string_view::npos) eol = text.size();
    std::string line(text.substr(cursor, eol - cursor));
    cursor = eol < text.size() ? eol + 1 : eol;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0][0] == '#') continue;
    const std::string where = "xyz: line " + std::to_string(line_no);
    if (tok.size() != 3 && tok.size() != 6)
      fail(where + ": expected \"x y z\" or \"x y z r g b\", got " + std::to_string(tok.size()) +
           " values");
    Point p;
    p.position.x() = parse_double_token(tok[0], where);
    p.position.y() = parse_double_token(tok[1], where);
    p.position.z() = parse_double_token(tok[2], where);
    if (!p.position.allFinite()) fail(where + ": non-finite coordinate");
    if (tok.size() == 6) {
      p.r = parse_color_token(tok[3], where);
      p.g = parse_color_token(tok[4], where);
      p.b = parse_color_token(tok[5], where);
    } else {
      p.r = p.g = p.b = 255;
    }
    cloud.push_back(p);
  }
  return cloud;
}

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

std::string write_xyz(const PointCloud& cloud) {
  std::string out;
  out.reserve(cloud.size() * 48);
  char buf[128];
  for (const Point& p : cloud.points()) {
    const int n = std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %u %u %u\n", p.position.x(),
                                p.position.y(), p.position.z(), unsigned(p.r), unsigned(p.g),
                                unsigned(p.b));
    out.append(buf, std::size_t(n));
  }
  return out;
}

std::string write_ply(const PointCloud& cloud) {
  std::ostringstream header;
  header << "ply\nformat binary_little_endian 1.0\nelement vertex " << cloud.size()
         << "\nproperty double x\nproperty double y\nproperty double z\n"
            "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
  std::string out = header.str();
  out.reserve(out.size() + cloud.size() * 27);
  const auto put_f64 = [&out](double v) {
    const std::uint64_t u = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(char(std::uint8_t(u >> (8 * i))));
  };
  for (const Point& p : cloud.points()) {
    put_f64(p.position.x());
    put_f64(p.position.y());
    put_f64(p.position.z());
    out.push_back(char(p.r));
    out.push_back(char(p.g));
    out.push_back(char(p.b));
  }
  return out;
}

std::string write_ppm(const ImageRGB8& image) {
  char header[64];
  const int n = std::snprintf(header, sizeof header, "P6\n%d %d\n255\n", image.width, image.height);
  std::string out(header, std::size_t(n));
  out.append(reinterpret_cast<const char*>(image.data.data()), image.data.size());
  return out;
}

// ---------------------------------------------------------------------------
// Path helpers
// ---------------------------------------------------------------------------

namespace {

std::string lower_ext(const std::string& path) {
  const std::size_t dot = path.rfind('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  return ext;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open \"" + path + "\"");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write \"" + path + "\"");
  out.write(data.data(), std::streamsize(data.size()));
  if (!out) fail("write failed for \"" + path + "\"");
}

}  // namespace

PointCloud load_cloud(const std::string& path) {
  if (path == "-") {
    std::string text(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
    return read_xyz(text);
  }
  const std::string ext = lower_ext(path);
  if (ext != ".las" && ext != ".ply" && ext != ".xyz" && ext != ".txt")
    fail("unsupported input extension \"" + ext + "\" (expected .las, .ply or .xyz)");
  const auto bytes = read_file(path);
  if (ext == ".las") return read_las(bytes);
  if (ext == ".ply") return read_ply(bytes);
  return read_xyz(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

void save_cloud(const PointCloud& cloud, const std::string& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".xyz") return write_file(path, write_xyz(cloud));
  if (ext == ".ply") return write_file(path, write_ply(cloud));
  fail("unsupported output extension \"" + ext + "\" (cloud writers: .xyz, .ply)");
}

void save_image(const ImageRGB8& image, const std::string& path) {
  const std::string data = write_ppm(image);
  if (path == "-") {
    std::cout.write(data.data(), std::streamsize(data.size()));
    std::cout.flush();
    return;
  }
  if (lower_ext(path) != ".ppm") fail("unsupported image extension (writer: .ppm)");
  write_file(path, data);
}

// ---------------------------------------------------------------------------
// Scene generation
// ---------------------------------------------------------------------------

const char* scene_kind_name(SceneKind kind) {
  switch (kind) {
    case SceneKind::RandomCube: return "random-cube";
    case SceneKind::ZFightPlanes: return "zfight-planes";
    case SceneKind::SphereShell: return "sphere-shell";
  }
  return "?";
}

bool scene_kind_from_name(std::string_view name, SceneKind& out) {
  if (name == "random-cube") out = SceneKind::RandomCube;
  else if (name == "zfight-planes") out = SceneKind::ZFightPlanes;
  else if (name == "sphere-shell") out = SceneKind::SphereShell;
  else return false;
  return true;
}

PointCloud generate(const SceneSpec& spec) {
  if (!(spec.extent > 0.0)) throw std::invalid_argument("scene: extent must be positive");
  SplitMix64 rng(spec.seed);
  PointCloud cloud;
  cloud.reserve(spec.count);

  const auto random_color = [&rng](Point& p) {
    const std::uint64_t v = rng.next();
    p.r = std::uint8_t(v);
    p.g = std::uint8_t(v >> 8);
    p.b = std::uint8_t(v >> 16);
  };

  switch (spec.kind) {
    case SceneKind::RandomCube: {
      for (std::uint64_t i = 0; i < spec.count; ++i) {
        Point p;
        p.position.x() = (rng.next_double() - 0.5) * spec.extent;
        p.position.y() = (rng.next_double() - 0.5) * spec.extent;
        p.position.z() = (rng.next_double() - 0.5) * spec.extent;
        random_color(p);
        cloud.push_back(p);
      }
      break;
    }
    case SceneKind::ZFightPlanes: {
      if (!(spec.distance > 0.0)) throw std::invalid_argument("scene: distance must be positive");
      if (!(spec.separation >= 0.0)) throw std::invalid_argument("scene: separation must be >= 0");
      // Planes interleave point by point (even -> near/red, odd -> far/blue)
      // over the same square, so nearly every covered pixel sees both
      // surfaces and submission order mixes them.
      for (std::uint64_t i = 0; i < spec.count; ++i) {
        const bool near_plane = i % 2 == 0;
        Point p;
        p.position.x() = (rng.next_double() - 0.5) * spec.extent;
        p.position.y() = (rng.next_double() - 0.5) * spec.extent;
        p.position.z() = near_plane ? -spec.distance : -(spec.distance + spec.separation);
        p.r = near_plane ? 255 : 0;
        p.g = 0;
        p.b = near_plane ? 0 : 255;
        cloud.push_back(p);
      }
      break;
    }
    case SceneKind::SphereShell: {
      const double radius = spec.extent / 2.0;
      for (std::uint64_t i = 0; i < spec.count; ++i) {
        const double z = 2.0 * rng.next_double() - 1.0;
        const double phi = 2.0 * std::numbers::pi * rng.next_double();
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        Point p;
        p.position.x() = radius * s * std::cos(phi);
        p.position.y() = radius * s * std::sin(phi);
        p.position.z() = radius * z;
        random_color(p);
        cloud.push_back(p);
      }
      break;
    }
  }
  return cloud;
}

}  // namespace pcrast
