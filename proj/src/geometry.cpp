// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#include "lodhead/geometry.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lodhead {
namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Separating-axis test on the closed triangles, treating contact along an
// edge or at a vertex as non-overlapping.
bool interiors_overlap(const std::array<Vec2, 3>& a, const std::array<Vec2, 3>& b) {
  constexpr double eps = 1e-12;
  auto separated_on = [&](const Vec2& axis) {
    double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
    for (int i = 0; i < 3; ++i) {
      const double pa = axis.dot(a[i]), pb = axis.dot(b[i]);
      amin = std::min(amin, pa);
      amax = std::max(amax, pa);
      bmin = std::min(bmin, pb);
      bmax = std::max(bmax, pb);
    }
    return amax <= bmin + eps || bmax <= amin + eps;
  };
  for (const auto* tri : {&a, &b}) {
    for (int i = 0; i < 3; ++i) {
      const Vec2 e = (*tri)[(i + 1) % 3] - (*tri)[i];
      if (separated_on(Vec2(-e.y(), e.x()))) return false;
    }
  }
  return true;
}

}  // namespace

void Mesh::validate() const {
  if (uvs.size() != vertices.size()) throw std::invalid_argument("mesh needs exactly one UV per vertex");
  for (std::size_t i = 0; i < uvs.size(); ++i) {
    const Vec2& t = uvs[i];
    if (!(t.x() >= 0.0 && t.x() <= 1.0 && t.y() >= 0.0 && t.y() <= 1.0))
      throw std::invalid_argument("UV of vertex " + std::to_string(i) + " lies outside [0,1]^2");
    if (!vertices[i].allFinite()) throw std::invalid_argument("vertex " + std::to_string(i) + " is not finite");
  }
  for (std::size_t b = 0; b < blendshapes.size(); ++b)
    if (blendshapes[b].size() != vertices.size())
      throw std::invalid_argument("blendshape " + std::to_string(b) + " has the wrong vertex count");

  std::vector<std::array<Vec2, 3>> tris(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (int k = 0; k < 3; ++k) {
      if (faces[f][k] >= vertices.size())
        throw std::invalid_argument("face " + std::to_string(f) + " references a missing vertex");
      tris[f][k] = uvs[faces[f][k]];
    }
    const double area = 0.5 * std::abs(cross2(tris[f][1] - tris[f][0], tris[f][2] - tris[f][0]));
    if (!(area > 1e-12)) throw std::invalid_argument("face " + std::to_string(f) + " is degenerate in UV space");
  }

  // Bucket faces on a coarse UV grid and test pairs sharing a cell.
  constexpr int grid = 64;
  std::vector<std::vector<std::uint32_t>> cells(grid * grid);
  auto cell_of = [](double t) { return std::clamp(static_cast<int>(t * grid), 0, grid - 1); };
  for (std::size_t f = 0; f < tris.size(); ++f) {
    double umin = 1, umax = 0, vmin = 1, vmax = 0;
    for (const Vec2& p : tris[f]) {
      umin = std::min(umin, p.x());
      umax = std::max(umax, p.x());
      vmin = std::min(vmin, p.y());
      vmax = std::max(vmax, p.y());
    }
    for (int cy = cell_of(vmin); cy <= cell_of(vmax); ++cy)
      for (int cx = cell_of(umin); cx <= cell_of(umax); ++cx) cells[cy * grid + cx].push_back(static_cast<std::uint32_t>(f));
  }
  for (const auto& cell : cells)
    for (std::size_t i = 0; i < cell.size(); ++i)
      for (std::size_t j = i + 1; j < cell.size(); ++j)
        if (interiors_overlap(tris[cell[i]], tris[cell[j]]))
          throw std::invalid_argument("faces " + std::to_string(cell[i]) + " and " + std::to_string(cell[j]) +
                                      " overlap in UV space");
}

std::vector<Vec3> deform(const Mesh& mesh, const ExpressionVector& expr) {
  std::vector<Vec3> out = mesh.vertices;
  const std::size_t active = std::min(expr.size(), mesh.blendshapes.size());
  for (std::size_t k = 0; k < active; ++k) {
    const double w = expr[k];
    if (w == 0.0) continue;
    const auto& basis = mesh.blendshapes[k];
    for (std::size_t v = 0; v < out.size(); ++v) out[v] += w * basis[v];
  }
  return out;
}

UVBinding bind_uv(const Mesh& mesh, int resolution) {
  if (resolution < 1) throw std::invalid_argument("UV resolution must be positive");
  UVBinding b;
  b.resolution = resolution;
  const std::size_t n = static_cast<std::size_t>(resolution) * resolution;
  b.face.assign(n, -1);
  b.corners.assign(n, {0u, 0u, 0u});
  b.bary.assign(n, {0.0, 0.0, 0.0});
  const double s = resolution;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Vec2 p0 = mesh.uvs[mesh.faces[f][0]] * s;
    const Vec2 p1 = mesh.uvs[mesh.faces[f][1]] * s;
    const Vec2 p2 = mesh.uvs[mesh.faces[f][2]] * s;
    const double area = cross2(p1 - p0, p2 - p0);
    if (area == 0.0) continue;
    const double umin = std::min({p0.x(), p1.x(), p2.x()}), umax = std::max({p0.x(), p1.x(), p2.x()});
    const double vmin = std::min({p0.y(), p1.y(), p2.y()}), vmax = std::max({p0.y(), p1.y(), p2.y()});
    const int x0 = std::max(0, static_cast<int>(std::floor(umin - 0.5)));
    const int x1 = std::min(resolution - 1, static_cast<int>(std::ceil(umax - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::floor(vmin - 0.5)));
    const int y1 = std::min(resolution - 1, static_cast<int>(std::ceil(vmax - 0.5)));
    constexpr double tol = -1e-12;
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const std::size_t idx = static_cast<std::size_t>(y) * resolution + x;
        if (b.face[idx] >= 0) continue;
        const Vec2 p(x + 0.5, y + 0.5);
        const double w0 = cross2(p1 - p, p2 - p) / area;
        const double w1 = cross2(p2 - p, p0 - p) / area;
        const double w2 = 1.0 - w0 - w1;
        if (w0 < tol || w1 < tol || w2 < tol) continue;
        b.face[idx] = static_cast<std::int32_t>(f);
        b.corners[idx] = mesh.faces[f];
        b.bary[idx] = {w0, w1, w2};
      }
    }
  }
  return b;
}

UVPositionMap apply_binding(const UVBinding& binding, const std::vector<Vec3>& vertices) {
  UVPositionMap pm;
  pm.resolution = binding.resolution;
  const std::size_t n = binding.face.size();
  pm.positions.assign(n, Vec3::Zero());
  pm.mask.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (binding.face[i] < 0) continue;
    const auto& c = binding.corners[i];
    const auto& w = binding.bary[i];
    pm.positions[i] = w[0] * vertices[c[0]] + w[1] * vertices[c[1]] + w[2] * vertices[c[2]];
    pm.mask[i] = 1;
  }
  return pm;
}

UVPositionMap rasterize_uv(const Mesh& mesh, const std::vector<Vec3>& deformed, int resolution) {
  if (deformed.size() != mesh.vertices.size())
    throw std::invalid_argument("deformed vertex count does not match the mesh");
  return apply_binding(bind_uv(mesh, resolution), deformed);
}

std::size_t gaussian_count(const UVPositionMap& pmap) {
  return static_cast<std::size_t>(std::count(pmap.mask.begin(), pmap.mask.end(), std::uint8_t{1}));
}

double mean_texel_spacing(const UVPositionMap& pmap) {
  const int s = pmap.resolution;
  double sum = 0.0;
  std::size_t count = 0;
  for (int y = 0; y < s; ++y) {
    for (int x = 0; x < s; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * s + x;
      if (!pmap.mask[i]) continue;
      if (x + 1 < s && pmap.mask[i + 1]) {
        sum += (pmap.positions[i + 1] - pmap.positions[i]).norm();
        ++count;
      }
      if (y + 1 < s && pmap.mask[i + s]) {
        sum += (pmap.positions[i + s] - pmap.positions[i]).norm();
        ++count;
      }
    }
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

PositionNormalizer PositionNormalizer::bounding_sphere(const std::vector<Vec3>& vertices) {
  PositionNormalizer n;
  if (vertices.empty()) return n;
  n.center = bounding_box_center(vertices);
  double r = 0.0;
  for (const Vec3& v : vertices) r = std::max(r, (v - n.center).norm());
  n.radius = r > 0.0 ? r : 1.0;
  return n;
}

template <class T>
FeatureMap<T> positional_encode(const UVPositionMap& pmap, int n_freq, const PositionNormalizer& norm) {
  if (n_freq < 0) throw std::invalid_argument("frequency count must be non-negative");
  const int ch = encoded_channels(n_freq);
  FeatureMap<T> out(pmap.resolution, ch);
  for (std::size_t i = 0; i < pmap.texel_count(); ++i) {
    if (!pmap.mask[i]) continue;
    T* dst = out.data.data() + i * ch;
    const Vec3 p = norm.apply(pmap.positions[i]);
    for (int d = 0; d < 3; ++d) dst[d] = static_cast<T>(p[d]);
    for (int d = 0; d < 3; ++d) {
      double freq = 1.0;
      for (int k = 0; k < n_freq; ++k, freq *= 2.0) {
        dst[3 + (d * n_freq + k) * 2] = static_cast<T>(std::sin(freq * p[d]));
        dst[3 + (d * n_freq + k) * 2 + 1] = static_cast<T>(std::cos(freq * p[d]));
      }
    }
  }
  return out;
}

template FeatureMap<float> positional_encode<float>(const UVPositionMap&, int, const PositionNormalizer&);
template FeatureMap<double> positional_encode<double>(const UVPositionMap&, int, const PositionNormalizer&);

void Camera::validate() const {
  if (!(fx > 0.0 && fy > 0.0)) throw std::invalid_argument("camera focal lengths must be positive");
  if (width < 1 || height < 1) throw std::invalid_argument("camera image size must be positive");
  if (!((rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-8))
    throw std::invalid_argument("camera rotation is not orthonormal");
  if (!translation.allFinite()) throw std::invalid_argument("camera translation is not finite");
}

Camera Camera::look_at(const Vec3& eye, const Vec3& target, double fov_x, int width, int height) {
  Camera cam;
  const Vec3 forward = (target - eye).normalized();
  const Vec3 right = forward.cross(Vec3::UnitY()).normalized();
  const Vec3 down = forward.cross(right);
  cam.rotation.row(0) = right.transpose();
  cam.rotation.row(1) = down.transpose();
  cam.rotation.row(2) = forward.transpose();
  cam.translation = -cam.rotation * eye;
  cam.width = width;
  cam.height = height;
  cam.fx = 0.5 * width / std::tan(0.5 * fov_x);
  cam.fy = cam.fx;
  cam.cx = 0.5 * width;
  cam.cy = 0.5 * height;
  return cam;
}

Camera orbit_camera(const Camera& base, double yaw, double pitch, const Vec3& center) {
  if (yaw == 0.0 && pitch == 0.0) return base;
  const Vec3 right = base.rotation.row(0).transpose();
  const Mat3 m = (Eigen::AngleAxisd(yaw, Vec3::UnitY()) * Eigen::AngleAxisd(pitch, right)).toRotationMatrix();
  Camera cam = base;
  const Vec3 eye = center + m * (base.position() - center);
  cam.rotation = base.rotation * m.transpose();
  cam.translation = -cam.rotation * eye;
  return cam;
}

Vec3 bounding_box_center(const std::vector<Vec3>& vertices) {
  if (vertices.empty()) return Vec3::Zero();
  Vec3 lo = vertices.front(), hi = vertices.front();
  for (const Vec3& v : vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return 0.5 * (lo + hi);
}

Mesh make_desk_head(const DeskHeadOptions& opts) {
  if (opts.n_lon < 3 || opts.n_lat < 2) throw std::invalid_argument("desk head needs n_lon >= 3 and n_lat >= 2");
  constexpr double pi = std::numbers::pi;
  Mesh mesh;
  const int cols = opts.n_lon + 1, rows = opts.n_lat + 1;
  std::vector<double> theta(static_cast<std::size_t>(cols) * rows), phi(theta.size());
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) {
      const double u = static_cast<double>(i) / opts.n_lon;
      const double v = static_cast<double>(j) / opts.n_lat;
      const double th = 2.0 * pi * (u - 0.5);
      const double ph = opts.neck_latitude + (0.5 * pi - opts.neck_latitude) * v;
      // Collapse the crown ring onto one point so the top stays closed.
      const double c = (j == rows - 1) ? 0.0 : std::cos(ph);
      const double sy = (j == rows - 1) ? 1.0 : std::sin(ph);
      mesh.vertices.emplace_back(opts.radii.x() * c * std::sin(th), opts.radii.y() * sy,
                                 opts.radii.z() * c * std::cos(th));
      mesh.uvs.emplace_back(opts.uv_margin + (1.0 - 2.0 * opts.uv_margin) * u,
                            opts.uv_margin + (1.0 - 2.0 * opts.uv_margin) * v);
      theta[mesh.vertices.size() - 1] = th;
      phi[mesh.vertices.size() - 1] = ph;
    }
  }
  for (int j = 0; j < opts.n_lat; ++j) {
    for (int i = 0; i < opts.n_lon; ++i) {
      const auto a = static_cast<std::uint32_t>(j * cols + i);
      const auto b = a + 1, d = a + static_cast<std::uint32_t>(cols), c = d + 1;
      mesh.faces.push_back({a, b, c});
      mesh.faces.push_back({a, c, d});
    }
  }

  // Bump centres (longitude, latitude) on the front: mouth, mouth corners,
  // brows, cheeks, forehead.
  static constexpr std::array<std::array<double, 2>, 8> centers{{{0.0, -0.45},
                                                                  {-0.35, -0.40},
                                                                  {0.35, -0.40},
                                                                  {-0.35, 0.35},
                                                                  {0.35, 0.35},
                                                                  {-0.60, -0.05},
                                                                  {0.60, -0.05},
                                                                  {0.0, 0.65}}};
  constexpr double bump_radius = 0.45;
  const int nb = std::clamp(opts.n_blendshapes, 0, static_cast<int>(centers.size()));
  const Vec3 inv_r2 = opts.radii.cwiseProduct(opts.radii).cwiseInverse();
  for (int k = 0; k < nb; ++k) {
    const Vec3 ck(std::cos(centers[k][1]) * std::sin(centers[k][0]), std::sin(centers[k][1]),
                  std::cos(centers[k][1]) * std::cos(centers[k][0]));
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    std::vector<Vec3> basis(mesh.vertices.size(), Vec3::Zero());
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
      const Vec3 dir(std::cos(phi[v]) * std::sin(theta[v]), std::sin(phi[v]), std::cos(phi[v]) * std::cos(theta[v]));
      const double ang = std::acos(std::clamp(dir.dot(ck), -1.0, 1.0));
      if (ang >= bump_radius) continue;
      const Vec3 normal = mesh.vertices[v].cwiseProduct(inv_r2).normalized();
      const double falloff = 0.5 * (1.0 + std::cos(pi * ang / bump_radius));
      basis[v] = sign * opts.blend_amplitude * falloff * normal;
    }
    mesh.blendshapes.push_back(std::move(basis));
  }
  return mesh;
}

}  // namespace lodhead
