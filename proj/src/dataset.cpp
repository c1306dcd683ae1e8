// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#include "lodhead/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "lodhead/errors.hpp"
#include "lodhead/image_io.hpp"
#include "lodhead/rng.hpp"
#include "lodhead/sh.hpp"

namespace lodhead {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kShC0 = 0.28209479177387814;

double smooth_blob(double lon, double lat, double clon, double clat, double width) {
  const double d2 = (lon - clon) * (lon - clon) + (lat - clat) * (lat - clat);
  return std::exp(-d2 / (2.0 * width * width));
}

// Inverse of the desk-head chart for a texel centre.
void texel_angles(const DeskHeadOptions& head, int resolution, std::size_t texel, double& lon, double& lat) {
  const double u = (static_cast<double>(texel % resolution) + 0.5) / resolution;
  const double v = (static_cast<double>(texel / resolution) + 0.5) / resolution;
  const double su = (u - head.uv_margin) / (1.0 - 2.0 * head.uv_margin);
  const double sv = (v - head.uv_margin) / (1.0 - 2.0 * head.uv_margin);
  lon = 2.0 * kPi * (su - 0.5);
  lat = head.neck_latitude + (0.5 * kPi - head.neck_latitude) * sv;
}

float round_f32(double x) { return static_cast<float>(x); }

}  // namespace

void FrameSample::validate() const {
  if (image.width < 1 || image.height < 1) throw DataError("frame image is empty");
  if (part_mask.width != image.width || part_mask.height != image.height)
    throw DataError("part mask is not aligned with the frame image");
  camera.validate();
  if (camera.width != image.width || camera.height != image.height)
    throw DataError("camera image size differs from the frame image");
  for (double e : expr)
    if (!std::isfinite(e)) throw DataError("expression contains non-finite values");
}

void SyntheticOptions::validate() const {
  if (n_frames < 1) throw ConfigError("n_frames must be at least 1");
  if (image_size < 8) throw ConfigError("image_size must be at least 8");
  if (resolution < 2) throw ConfigError("ground-truth resolution must be at least 2");
  if (expr_dim < head.n_blendshapes) throw ConfigError("expr_dim must cover every blendshape");
  if (!(scale_factor > 0)) throw ConfigError("scale_factor must be positive");
  if (!(opacity > 0 && opacity < 1)) throw ConfigError("opacity must lie in (0, 1)");
  if (!(distance > 0) || !(fov_x > 0 && fov_x < kPi)) throw ConfigError("camera distance/fov out of range");
}

std::array<double, 3> procedural_albedo(double lon, double lat) {
  std::array<double, 3> c{0.86, 0.66, 0.55};
  const double shade = 0.06 * std::sin(2.0 * lon + 0.3) * std::cos(lat) + 0.05 * std::sin(1.5 * lat);
  const double hair = 1.0 / (1.0 + std::exp(-(lat - 0.95) / 0.12));
  const double lips = smooth_blob(lon, lat, 0.0, -0.45, 0.16);
  const double eye_l = smooth_blob(lon, lat, -0.33, 0.2, 0.13), eye_r = smooth_blob(lon, lat, 0.33, 0.2, 0.13);
  const double cheek = smooth_blob(std::abs(lon), lat, 0.6, -0.15, 0.22);
  const std::array<double, 3> lip_col{0.72, 0.30, 0.32}, eye_col{0.18, 0.22, 0.35}, hair_col{0.30, 0.20, 0.12};
  for (int ch = 0; ch < 3; ++ch) {
    double v = c[ch] + shade + 0.05 * cheek * (ch == 0 ? 1.0 : -0.5);
    v += lips * (lip_col[ch] - v);
    v += std::max(eye_l, eye_r) * (eye_col[ch] - v);
    v += hair * (hair_col[ch] - v);
    c[ch] = std::clamp(v, 0.0, 1.0);
  }
  return c;
}

bool in_part_region(double lon, double lat) {
  const bool mouth = std::abs(lon) <= 0.38 && lat >= -0.62 && lat <= -0.28;
  const bool eyes = std::abs(lon) >= 0.12 && std::abs(lon) <= 0.55 && lat >= 0.05 && lat <= 0.35;
  return mouth || eyes;
}

GaussianSet<double> ground_truth_gaussians(const Mesh& mesh, const ExpressionVector& expr,
                                           const SyntheticOptions& opts, bool part_indicator) {
  const UVBinding binding = bind_uv(mesh, opts.resolution);
  const UVPositionMap rest = apply_binding(binding, mesh.vertices);
  const UVPositionMap pmap = apply_binding(binding, deform(mesh, expr));
  const double scale = mean_texel_spacing(rest) * opts.scale_factor;
  GaussianSet<double> g;
  g.sh_degree = kMaxShDegree;
  g.resize(gaussian_count(pmap));
  const int stride = g.sh_stride();
  std::size_t n = 0;
  for (std::size_t t = 0; t < pmap.mask.size(); ++t) {
    if (!pmap.mask[t]) continue;
    double lon = 0, lat = 0;
    texel_angles(opts.head, opts.resolution, t, lon, lat);
    for (int a = 0; a < 3; ++a) {
      g.means[3 * n + a] = pmap.positions[t][a];
      g.scales[3 * n + a] = scale;
    }
    g.rotations[4 * n] = 1.0;
    g.opacities[n] = opts.opacity;
    std::array<double, 3> col;
    if (part_indicator) {
      const double v = in_part_region(lon, lat) ? 1.0 : 0.0;
      col = {v, v, v};
    } else {
      col = procedural_albedo(lon, lat);
    }
    for (int ch = 0; ch < 3; ++ch) g.sh[n * stride + ch] = (col[ch] - 0.5) / kShC0;
    ++n;
  }
  return g;
}

Camera synthetic_base_camera(const Mesh& mesh, const SyntheticOptions& opts) {
  const Vec3 center = bounding_box_center(mesh.vertices);
  return Camera::look_at(center + Vec3(0.0, 0.0, opts.distance), center, opts.fov_x, opts.image_size,
                         opts.image_size);
}

Dataset generate_synthetic_dataset(const SyntheticOptions& opts) {
  opts.validate();
  Dataset data;
  data.mesh = make_desk_head(opts.head);
  // Stored offsets are float32 on disk; keep memory and disk identical.
  for (auto& b : data.mesh.blendshapes)
    for (Vec3& v : b) v = Vec3(round_f32(v.x()), round_f32(v.y()), round_f32(v.z()));

  Rng rng(opts.seed);
  const int nb = opts.head.n_blendshapes;
  std::vector<double> amp(nb), freq(nb), phase(nb);
  for (int k = 0; k < nb; ++k) {
    amp[k] = rng.uniform(0.5, 1.0) * opts.expr_amplitude;
    freq[k] = 1.0 + static_cast<double>(rng.below(2));
    phase[k] = rng.uniform(0.0, 2.0 * kPi);
  }
  const double yaw_phase = rng.uniform(0.0, 2.0 * kPi), pitch_phase = rng.uniform(0.0, 2.0 * kPi);

  const Camera base = synthetic_base_camera(data.mesh, opts);
  const Vec3 center = bounding_box_center(data.mesh.vertices);
  const double bound = std::min(1.0, opts.expr_amplitude);
  RenderSettings mask_settings;
  mask_settings.background = {0.0, 0.0, 0.0};
  for (int f = 0; f < opts.n_frames; ++f) {
    const double t = static_cast<double>(f) / opts.n_frames;
    FrameSample s;
    s.expr.assign(static_cast<std::size_t>(opts.expr_dim), 0.0);
    for (int k = 0; k < nb; ++k)
      s.expr[k] = round_f32(std::clamp(amp[k] * std::sin(2.0 * kPi * freq[k] * t + phase[k]), -bound, bound));
    s.camera = orbit_camera(base, opts.yaw_range * std::sin(2.0 * kPi * t + yaw_phase),
                            opts.pitch_range * std::sin(2.0 * kPi * t + pitch_phase), center);
    s.image = render_reference(ground_truth_gaussians(data.mesh, s.expr, opts), s.camera).image.clamped().cast<float>();
    const auto ind = render_reference(ground_truth_gaussians(data.mesh, s.expr, opts, true), s.camera, mask_settings);
    s.part_mask = PixelMask(opts.image_size, opts.image_size);
    for (std::size_t p = 0; p < s.part_mask.data.size(); ++p) s.part_mask.data[p] = ind.image.data[3 * p] > 0.5 ? 1 : 0;
    data.frames.push_back(std::move(s));
  }
  return data;
}

// ---------------------------------------------------------------------------
// Disk layout

namespace {

template <class V>
void put(std::ostream& os, V v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(V));
}

template <class V>
V get(std::istream& is, const std::filesystem::path& path) {
  V v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(V))) throw DataError("truncated sidecar " + path.string());
  return v;
}

std::string frame_name(std::size_t i) {
  std::ostringstream os;
  os << "frame_" << std::setw(4) << std::setfill('0') << i;
  return os.str();
}

}  // namespace

void write_frame_sidecar(const std::filesystem::path& path, const ExpressionVector& expr, const Camera& cam) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write " + path.string());
  put<std::uint32_t>(os, static_cast<std::uint32_t>(expr.size()));
  for (double e : expr) put<float>(os, static_cast<float>(e));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(cam.width));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(cam.height));
  for (double v : {cam.fx, cam.fy, cam.cx, cam.cy}) put<double>(os, v);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) put<double>(os, cam.rotation(r, c));
  for (int a = 0; a < 3; ++a) put<double>(os, cam.translation[a]);
  if (!os) throw DataError("failed writing " + path.string());
}

void read_frame_sidecar(const std::filesystem::path& path, ExpressionVector& expr, Camera& cam) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open " + path.string());
  const auto n = get<std::uint32_t>(is, path);
  if (n > (1u << 20)) throw DataError("implausible expression size in " + path.string());
  expr.resize(n);
  for (auto& e : expr) e = get<float>(is, path);
  cam.width = static_cast<int>(get<std::uint32_t>(is, path));
  cam.height = static_cast<int>(get<std::uint32_t>(is, path));
  cam.fx = get<double>(is, path);
  cam.fy = get<double>(is, path);
  cam.cx = get<double>(is, path);
  cam.cy = get<double>(is, path);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) cam.rotation(r, c) = get<double>(is, path);
  for (int a = 0; a < 3; ++a) cam.translation[a] = get<double>(is, path);
  if (is.peek() != std::char_traits<char>::eof()) throw DataError("trailing bytes in " + path.string());
}

void save_dataset(const Dataset& data, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
  save_mesh(data.mesh, dir / "mesh.obj", dir / "mesh.blend");
  std::ofstream manifest(dir / "manifest.txt");
  if (!manifest) throw DataError("cannot write manifest in " + dir.string());
  manifest << "format=lodhead-dataset-1\n";
  manifest << "mesh=mesh.obj\n";
  manifest << "blendshapes=mesh.blend\n";
  manifest << "frames=" << data.frames.size() << "\n";
  for (std::size_t i = 0; i < data.frames.size(); ++i) {
    const FrameSample& s = data.frames[i];
    const std::string name = frame_name(i);
    write_png(dir / (name + ".png"), s.image);
    write_mask_png(dir / (name + "_mask.png"), s.part_mask);
    write_frame_sidecar(dir / (name + ".bin"), s.expr, s.camera);
    manifest << "frame=" << name << "\n";
  }
}

Dataset load_dataset(const std::filesystem::path& dir) {
  std::ifstream manifest(dir / "manifest.txt");
  if (!manifest) throw DataError("no manifest.txt in " + dir.string());
  std::string line, mesh_name, blend_name;
  std::vector<std::string> names;
  long declared = -1;
  bool format_ok = false;
  int lineno = 0;
  while (std::getline(manifest, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError("manifest line " + std::to_string(lineno) + " is not key=value");
    const std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    if (key == "format") format_ok = value == "lodhead-dataset-1";
    else if (key == "mesh") mesh_name = value;
    else if (key == "blendshapes") blend_name = value;
    else if (key == "frames") declared = std::stol(value);
    else if (key == "frame") names.push_back(value);
    else throw DataError("unknown manifest key '" + key + "'");
  }
  if (!format_ok) throw DataError("manifest format is missing or unsupported");
  if (mesh_name.empty()) throw DataError("manifest does not name a mesh");
  if (declared != static_cast<long>(names.size())) throw DataError("manifest frame count does not match its frame list");
  Dataset data;
  try {
    data.mesh = load_mesh(dir / mesh_name, blend_name.empty() ? std::filesystem::path{} : dir / blend_name);
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("mesh rejected: ") + e.what());
  }
  for (const auto& name : names) {
    FrameSample s;
    s.image = read_png(dir / (name + ".png"));
    s.part_mask = read_mask_png(dir / (name + "_mask.png"));
    read_frame_sidecar(dir / (name + ".bin"), s.expr, s.camera);
    try {
      s.validate();
    } catch (const std::invalid_argument& e) {
      throw DataError(name + ": " + e.what());
    }
    data.frames.push_back(std::move(s));
  }
  return data;
}

}  // namespace lodhead
