// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#include "lodhead/splat.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lodhead {

template <class T>
void GaussianSet<T>::resize(std::size_t n) {
  means.assign(3 * n, T(0));
  scales.assign(3 * n, T(0));
  rotations.assign(4 * n, T(0));
  opacities.assign(n, T(0));
  sh.assign(static_cast<std::size_t>(sh_stride()) * n, T(0));
}

template <class T>
void GaussianSet<T>::check_invariants() const {
  const std::size_t n = size();
  if (means.size() != 3 * n || scales.size() != 3 * n || rotations.size() != 4 * n ||
      sh.size() != static_cast<std::size_t>(sh_stride()) * n)
    throw std::invalid_argument("Gaussian attribute arrays have inconsistent lengths");
  auto fail = [](std::size_t i, const char* what) {
    throw std::invalid_argument("Gaussian " + std::to_string(i) + ": " + what);
  };
  for (std::size_t i = 0; i < n; ++i) {
    double qn = 0;
    for (int k = 0; k < 4; ++k) qn += double(rotations[4 * i + k]) * rotations[4 * i + k];
    if (!(std::abs(std::sqrt(qn) - 1.0) <= 1e-6)) fail(i, "rotation is not a unit quaternion");
    for (int k = 0; k < 3; ++k) {
      if (!(scales[3 * i + k] > T(0)) || !std::isfinite(double(scales[3 * i + k]))) fail(i, "scale must be positive");
      if (!std::isfinite(double(means[3 * i + k]))) fail(i, "mean is not finite");
    }
    if (!(opacities[i] > T(0) && opacities[i] < T(1))) fail(i, "opacity must lie in (0, 1)");
    for (int k = 0; k < sh_stride(); ++k)
      if (!std::isfinite(double(sh[i * sh_stride() + k]))) fail(i, "SH coefficient is not finite");
  }
}

namespace {

template <class T>
Mat3T<T> rotation_from_unit_quaternion(T w, T x, T y, T z) {
  Mat3T<T> r;
  r << T(1) - T(2) * (y * y + z * z), T(2) * (x * y - w * z), T(2) * (x * z + w * y),
      T(2) * (x * y + w * z), T(1) - T(2) * (x * x + z * z), T(2) * (y * z - w * x),
      T(2) * (x * z - w * y), T(2) * (y * z + w * x), T(1) - T(2) * (x * x + y * y);
  return r;
}

// d loss / d(w, x, y, z) for a loss gradient g on R(q) with q unit.
template <class T>
std::array<T, 4> rotation_quaternion_grad(const Mat3T<T>& g, T w, T x, T y, T z) {
  std::array<T, 4> out{};
  out[0] = T(2) * (-z * g(0, 1) + y * g(0, 2) + z * g(1, 0) - x * g(1, 2) - y * g(2, 0) + x * g(2, 1));
  out[1] = T(2) * (y * g(0, 1) + z * g(0, 2) + y * g(1, 0) - w * g(1, 2) + z * g(2, 0) + w * g(2, 1)) -
           T(4) * x * (g(1, 1) + g(2, 2));
  out[2] = T(2) * (x * g(0, 1) + w * g(0, 2) + x * g(1, 0) + z * g(1, 2) - w * g(2, 0) + z * g(2, 1)) -
           T(4) * y * (g(0, 0) + g(2, 2));
  out[3] = T(2) * (-w * g(0, 1) + x * g(0, 2) + w * g(1, 0) + y * g(1, 2) + x * g(2, 0) + y * g(2, 1)) -
           T(4) * z * (g(0, 0) + g(1, 1));
  return out;
}

// M M^T with the lower triangle mirrored from the upper one.
template <class T>
Mat3T<T> gram_of(const Mat3T<T>& m) {
  Mat3T<T> g = m * m.transpose();
  g(1, 0) = g(0, 1);
  g(2, 0) = g(0, 2);
  g(2, 1) = g(1, 2);
  return g;
}

template <class T>
struct Projected {
  Vec3T<T> p_cam;
  Mat3T<T> rot_q;        // rotation from the normalized quaternion
  Vec3T<T> scale;
  Mat3T<T> sigma;        // 3D covariance
  Eigen::Matrix<T, 2, 3> jac;
  Eigen::Matrix<T, 2, 3> tm;  // jac * view rotation
  T qn[4];
  T qnorm;
  Vec3T<T> view;         // mu - camera position
  T basis[16];
  T dbasis[48];
};

template <class T>
std::optional<SplatPrimitive<T>> project_impl(const GaussianSet<T>& set, std::size_t i, const Camera& cam,
                                              const RenderSettings& st, Projected<T>* keep) {
  const Mat3T<T> view_rot = cam.rotation.cast<T>();
  const Vec3T<T> mu(set.means[3 * i], set.means[3 * i + 1], set.means[3 * i + 2]);
  const Vec3T<T> p = view_rot * mu + cam.translation.cast<T>();
  if (!(p.z() > T(st.near_plane))) return std::nullopt;
  const T fx = T(cam.fx), fy = T(cam.fy);
  const T inv_z = T(1) / p.z();
  SplatPrimitive<T> prim;
  prim.id = static_cast<std::uint32_t>(i);
  prim.mean[0] = fx * p.x() * inv_z + T(cam.cx);
  prim.mean[1] = fy * p.y() * inv_z + T(cam.cy);
  const T gx = T(st.guard_band * cam.width), gy = T(st.guard_band * cam.height);
  if (prim.mean[0] < -gx || prim.mean[0] > T(cam.width) + gx || prim.mean[1] < -gy ||
      prim.mean[1] > T(cam.height) + gy)
    return std::nullopt;
  prim.opacity = set.opacities[i];
  if (!(prim.opacity >= T(st.alpha_cutoff))) return std::nullopt;

  Projected<T> pr;
  const T* q = &set.rotations[4 * i];
  pr.qnorm = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
  for (int k = 0; k < 4; ++k) pr.qn[k] = q[k] / pr.qnorm;
  pr.rot_q = rotation_from_unit_quaternion(pr.qn[0], pr.qn[1], pr.qn[2], pr.qn[3]);
  pr.scale = Vec3T<T>(set.scales[3 * i], set.scales[3 * i + 1], set.scales[3 * i + 2]);
  const Mat3T<T> m = pr.rot_q * pr.scale.asDiagonal();
  pr.sigma = gram_of(m);
  pr.jac << fx * inv_z, T(0), -fx * p.x() * inv_z * inv_z, T(0), fy * inv_z, -fy * p.y() * inv_z * inv_z;
  pr.tm = pr.jac * view_rot;
  prim.cov = pr.tm * pr.sigma * pr.tm.transpose();
  prim.cov(0, 0) += T(st.dilation);
  prim.cov(1, 1) += T(st.dilation);
  prim.cov(0, 1) = prim.cov(1, 0) = T(0.5) * (prim.cov(0, 1) + prim.cov(1, 0));
  const T det = prim.cov.determinant();
  if (!(det > T(0))) return std::nullopt;
  prim.conic << prim.cov(1, 1) / det, -prim.cov(0, 1) / det, -prim.cov(1, 0) / det, prim.cov(0, 0) / det;
  prim.depth = p.z();

  pr.view = mu - cam.position().cast<T>();
  const Vec3T<T> dir = pr.view.normalized();
  const T d[3] = {dir.x(), dir.y(), dir.z()};
  sh_basis<T>(set.sh_degree, d, pr.basis, pr.dbasis);
  const T* coeff = &set.sh[i * set.sh_stride()];
  for (int c = 0; c < 3; ++c) {
    T v = T(0.5);
    for (int k = 0; k < sh_basis_count(set.sh_degree); ++k) v += pr.basis[k] * coeff[3 * k + c];
    prim.clamped[c] = v < T(0);
    prim.color[c] = prim.clamped[c] ? T(0) : v;
  }

  const T a = prim.cov(0, 0), b = prim.cov(0, 1), c = prim.cov(1, 1);
  const T lambda_max = T(0.5) * (a + c) + std::sqrt(T(0.25) * (a - c) * (a - c) + b * b);
  const T reach = T(2) * std::log(prim.opacity / T(st.alpha_cutoff));
  prim.radius = std::sqrt(std::max(reach, T(0)) * lambda_max) + T(1);
  pr.p_cam = p;
  if (keep) *keep = pr;
  return prim;
}

// Shared per-pixel compositing walk. Returns the number of list entries visited.
template <class T>
std::uint32_t composite_pixel(const std::vector<SplatPrimitive<T>>& prims, const std::vector<std::uint32_t>& list,
                              T px, T py, const RenderSettings& st, T rgb[3], T& transmittance) {
  const T cutoff = T(st.alpha_cutoff), t_min = T(st.min_transmittance), max_alpha = T(st.max_alpha);
  T tr = T(1);
  T c0 = T(0), c1 = T(0), c2 = T(0);
  std::uint32_t walked = 0;
  for (std::uint32_t idx : list) {
    ++walked;
    const SplatPrimitive<T>& p = prims[idx];
    const T dx = px - p.mean[0], dy = py - p.mean[1];
    const T power = T(-0.5) * (p.conic(0, 0) * dx * dx + T(2) * p.conic(0, 1) * dx * dy + p.conic(1, 1) * dy * dy);
    if (power > T(0)) continue;
    const T alpha = std::min(max_alpha, p.opacity * std::exp(power));
    if (alpha < cutoff) continue;
    const T w = alpha * tr;
    c0 += p.color[0] * w;
    c1 += p.color[1] * w;
    c2 += p.color[2] * w;
    tr *= (T(1) - alpha);
    if (tr < t_min) break;
  }
  rgb[0] = c0;
  rgb[1] = c1;
  rgb[2] = c2;
  transmittance = tr;
  return walked;
}

template <class T>
std::vector<SplatPrimitive<T>> project_all(const GaussianSet<T>& set, const Camera& cam, const RenderSettings& st) {
  std::vector<SplatPrimitive<T>> prims;
  prims.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i)
    if (auto p = project_impl<T>(set, i, cam, st, nullptr)) prims.push_back(*p);
  std::stable_sort(prims.begin(), prims.end(),
                   [](const SplatPrimitive<T>& a, const SplatPrimitive<T>& b) { return a.depth < b.depth; });
  return prims;
}

template <class T>
void composite_tiles(RenderResult<T>& out, const Camera& cam, const RenderSettings& st) {
  const int w = cam.width, h = cam.height;
  out.image = Image<T>(w, h);
  out.alpha.assign(static_cast<std::size_t>(w) * h, T(0));
  out.final_transmittance.assign(out.alpha.size(), T(1));
  out.n_contrib.assign(out.alpha.size(), 0);
  const T bg[3] = {T(st.background[0]), T(st.background[1]), T(st.background[2])};
  for (int ty = 0; ty < out.tiles_y; ++ty) {
    for (int tx = 0; tx < out.tiles_x; ++tx) {
      const auto& list = out.tiles[static_cast<std::size_t>(ty) * out.tiles_x + tx];
      const int x1 = std::min(w, (tx + 1) * out.tile_size), y1 = std::min(h, (ty + 1) * out.tile_size);
      for (int y = ty * out.tile_size; y < y1; ++y) {
        for (int x = tx * out.tile_size; x < x1; ++x) {
          const std::size_t pix = static_cast<std::size_t>(y) * w + x;
          T rgb[3], tr;
          out.n_contrib[pix] = composite_pixel(out.prims, list, T(x) + T(0.5), T(y) + T(0.5), st, rgb, tr);
          T* dst = out.image.pixel(x, y);
          for (int c = 0; c < 3; ++c) dst[c] = rgb[c] + tr * bg[c];
          out.final_transmittance[pix] = tr;
          out.alpha[pix] = T(1) - tr;
        }
      }
    }
  }
}

}  // namespace

template <class T>
Mat3T<T> covariance_from_sq(const std::array<T, 3>& s, const std::array<T, 4>& q) {
  const double n = std::sqrt(double(q[0]) * q[0] + double(q[1]) * q[1] + double(q[2]) * q[2] + double(q[3]) * q[3]);
  if (!(std::abs(n - 1.0) <= 1e-6)) throw std::invalid_argument("covariance needs a unit quaternion");
  if (!(s[0] > T(0) && s[1] > T(0) && s[2] > T(0))) throw std::invalid_argument("covariance needs positive scales");
  const Mat3T<T> r = rotation_from_unit_quaternion(q[0], q[1], q[2], q[3]);
  return gram_of(Mat3T<T>(r * Vec3T<T>(s[0], s[1], s[2]).asDiagonal()));
}

template <class T>
T evaluate_gaussian(const Vec3T<T>& x, const Vec3T<T>& mu, const Mat3T<T>& sigma) {
  Eigen::SelfAdjointEigenSolver<Mat3T<T>> es(sigma);
  const auto ev = es.eigenvalues();
  if (!(ev.minCoeff() > T(0)) || ev.maxCoeff() / ev.minCoeff() >= T(1e12))
    throw std::invalid_argument("covariance is singular or ill-conditioned");
  const Vec3T<T> d = x - mu;
  return std::exp(T(-0.5) * d.dot(sigma.ldlt().solve(d)));
}

template <class T>
std::optional<SplatPrimitive<T>> project(const GaussianSet<T>& set, std::size_t index, const Camera& cam,
                                         const RenderSettings& settings) {
  return project_impl<T>(set, index, cam, settings, nullptr);
}

template <class T>
RenderResult<T> render(const GaussianSet<T>& set, const Camera& cam, const RenderSettings& st) {
  if (st.tile_size < 1) throw std::invalid_argument("tile size must be positive");
  RenderResult<T> out;
  out.prims = project_all(set, cam, st);
  out.tile_size = st.tile_size;
  out.tiles_x = (cam.width + st.tile_size - 1) / st.tile_size;
  out.tiles_y = (cam.height + st.tile_size - 1) / st.tile_size;
  out.tiles.assign(static_cast<std::size_t>(out.tiles_x) * out.tiles_y, {});
  for (std::size_t k = 0; k < out.prims.size(); ++k) {
    const auto& p = out.prims[k];
    // Pixel centres sit at +0.5; a pixel is touched if its centre is within radius.
    const double x0 = std::floor(double(p.mean[0] - p.radius) - 0.5), x1 = std::ceil(double(p.mean[0] + p.radius) - 0.5);
    const double y0 = std::floor(double(p.mean[1] - p.radius) - 0.5), y1 = std::ceil(double(p.mean[1] + p.radius) - 0.5);
    if (x1 < 0 || y1 < 0 || x0 >= cam.width || y0 >= cam.height) continue;
    const int tx0 = std::max(0, static_cast<int>(x0) / st.tile_size);
    const int tx1 = std::min(out.tiles_x - 1, static_cast<int>(std::min(x1, double(cam.width - 1))) / st.tile_size);
    const int ty0 = std::max(0, static_cast<int>(y0) / st.tile_size);
    const int ty1 = std::min(out.tiles_y - 1, static_cast<int>(std::min(y1, double(cam.height - 1))) / st.tile_size);
    for (int ty = ty0; ty <= ty1; ++ty)
      for (int tx = tx0; tx <= tx1; ++tx)
        out.tiles[static_cast<std::size_t>(ty) * out.tiles_x + tx].push_back(static_cast<std::uint32_t>(k));
  }
  composite_tiles(out, cam, st);
  return out;
}

template <class T>
RenderResult<T> render_reference(const GaussianSet<T>& set, const Camera& cam, const RenderSettings& st) {
  RenderResult<T> out;
  out.prims = project_all(set, cam, st);
  out.tile_size = std::max(cam.width, cam.height);
  out.tiles_x = out.tiles_y = 1;
  std::vector<std::uint32_t> all(out.prims.size());
  std::iota(all.begin(), all.end(), 0u);
  out.tiles.push_back(std::move(all));
  composite_tiles(out, cam, st);
  return out;
}

template <class T>
GaussianSet<T> render_backward(const GaussianSet<T>& set, const Camera& cam, const RenderSettings& st,
                               const RenderResult<T>& fwd, const Image<T>& grad_image) {
  if (grad_image.width != cam.width || grad_image.height != cam.height)
    throw std::invalid_argument("image gradient shape does not match the render");
  GaussianSet<T> grads;
  grads.sh_degree = set.sh_degree;
  grads.resize(set.size());

  const std::size_t np = fwd.prims.size();
  std::vector<T> g_mean(2 * np, T(0)), g_opacity(np, T(0)), g_color(3 * np, T(0));
  std::vector<Mat2T<T>> g_conic(np, Mat2T<T>::Zero());
  const T cutoff = T(st.alpha_cutoff), max_alpha = T(st.max_alpha);
  const T bg[3] = {T(st.background[0]), T(st.background[1]), T(st.background[2])};
  const int w = cam.width;

  for (int ty = 0; ty < fwd.tiles_y; ++ty) {
    for (int tx = 0; tx < fwd.tiles_x; ++tx) {
      const auto& list = fwd.tiles[static_cast<std::size_t>(ty) * fwd.tiles_x + tx];
      const int x1 = std::min(cam.width, (tx + 1) * fwd.tile_size), y1 = std::min(cam.height, (ty + 1) * fwd.tile_size);
      for (int y = ty * fwd.tile_size; y < y1; ++y) {
        for (int x = tx * fwd.tile_size; x < x1; ++x) {
          const std::size_t pix = static_cast<std::size_t>(y) * w + x;
          const T* gpix = grad_image.pixel(x, y);
          if (gpix[0] == T(0) && gpix[1] == T(0) && gpix[2] == T(0)) continue;
          const T px = T(x) + T(0.5), py = T(y) + T(0.5);
          T tr = fwd.final_transmittance[pix];
          T behind[3] = {bg[0], bg[1], bg[2]};
          for (std::uint32_t n = fwd.n_contrib[pix]; n-- > 0;) {
            const std::uint32_t k = list[n];
            const SplatPrimitive<T>& p = fwd.prims[k];
            const T dx = px - p.mean[0], dy = py - p.mean[1];
            const T power =
                T(-0.5) * (p.conic(0, 0) * dx * dx + T(2) * p.conic(0, 1) * dx * dy + p.conic(1, 1) * dy * dy);
            if (power > T(0)) continue;
            const T gauss = std::exp(power);
            const bool saturated = p.opacity * gauss > max_alpha;
            const T alpha = saturated ? max_alpha : p.opacity * gauss;
            if (alpha < cutoff) continue;
            const T t_before = tr / (T(1) - alpha);
            T g_alpha = T(0);
            for (int c = 0; c < 3; ++c) {
              g_color[3 * k + c] += alpha * t_before * gpix[c];
              g_alpha += (p.color[c] - behind[c]) * t_before * gpix[c];
              behind[c] = alpha * p.color[c] + (T(1) - alpha) * behind[c];
            }
            tr = t_before;
            if (saturated) continue;
            g_opacity[k] += gauss * g_alpha;
            const T g_power = alpha * g_alpha;
            g_mean[2 * k] += g_power * (p.conic(0, 0) * dx + p.conic(0, 1) * dy);
            g_mean[2 * k + 1] += g_power * (p.conic(0, 1) * dx + p.conic(1, 1) * dy);
            g_conic[k](0, 0) += T(-0.5) * g_power * dx * dx;
            g_conic[k](0, 1) += T(-0.5) * g_power * dx * dy;
            g_conic[k](1, 0) += T(-0.5) * g_power * dx * dy;
            g_conic[k](1, 1) += T(-0.5) * g_power * dy * dy;
          }
        }
      }
    }
  }

  const Mat3T<T> view_rot = cam.rotation.cast<T>();
  const T fx = T(cam.fx), fy = T(cam.fy);
  for (std::size_t k = 0; k < np; ++k) {
    const SplatPrimitive<T>& prim = fwd.prims[k];
    const std::size_t i = prim.id;
    Projected<T> pr;
    if (!project_impl<T>(set, i, cam, st, &pr)) continue;

    // Colour through SH.
    const int nb = sh_basis_count(set.sh_degree);
    Vec3T<T> g_dir = Vec3T<T>::Zero();
    const T* coeff = &set.sh[i * set.sh_stride()];
    T* g_sh = &grads.sh[i * set.sh_stride()];
    for (int c = 0; c < 3; ++c) {
      if (prim.clamped[c]) continue;
      const T gc = g_color[3 * k + c];
      for (int b = 0; b < nb; ++b) {
        g_sh[3 * b + c] += pr.basis[b] * gc;
        for (int a = 0; a < 3; ++a) g_dir[a] += coeff[3 * b + c] * gc * pr.dbasis[3 * b + a];
      }
    }
    const T vlen = pr.view.norm();
    const Vec3T<T> u = pr.view / vlen;
    Vec3T<T> g_mu = (g_dir - u * u.dot(g_dir)) / vlen;

    grads.opacities[i] += g_opacity[k];

    // Conic -> 2D covariance -> (projection, 3D covariance).
    const Mat2T<T>& q = prim.conic;
    const Mat2T<T> g_cov2 = -q * g_conic[k] * q;
    const Eigen::Matrix<T, 2, 3> g_tm = T(2) * g_cov2 * pr.tm * pr.sigma;
    const Mat3T<T> g_sigma = pr.tm.transpose() * g_cov2 * pr.tm;
    const Eigen::Matrix<T, 2, 3> g_jac = g_tm * view_rot.transpose();

    const T x = pr.p_cam.x(), y = pr.p_cam.y(), z = pr.p_cam.z();
    const T iz = T(1) / z, iz2 = iz * iz, iz3 = iz2 * iz;
    Vec3T<T> g_p;
    g_p.x() = fx * iz * g_mean[2 * k] - fx * iz2 * g_jac(0, 2);
    g_p.y() = fy * iz * g_mean[2 * k + 1] - fy * iz2 * g_jac(1, 2);
    g_p.z() = -fx * x * iz2 * g_mean[2 * k] - fy * y * iz2 * g_mean[2 * k + 1] - fx * iz2 * g_jac(0, 0) +
              T(2) * fx * x * iz3 * g_jac(0, 2) - fy * iz2 * g_jac(1, 1) + T(2) * fy * y * iz3 * g_jac(1, 2);
    g_mu += view_rot.transpose() * g_p;
    for (int a = 0; a < 3; ++a) grads.means[3 * i + a] += g_mu[a];

    // Sigma = M M^T, M = R(q) diag(s).
    const Mat3T<T> m = pr.rot_q * pr.scale.asDiagonal();
    const Mat3T<T> g_m = T(2) * g_sigma * m;
    Mat3T<T> g_r;
    for (int col = 0; col < 3; ++col) {
      grads.scales[3 * i + col] += g_m.col(col).dot(pr.rot_q.col(col));
      g_r.col(col) = g_m.col(col) * pr.scale[col];
    }
    const auto g_qn = rotation_quaternion_grad<T>(g_r, pr.qn[0], pr.qn[1], pr.qn[2], pr.qn[3]);
    T dot = T(0);
    for (int a = 0; a < 4; ++a) dot += pr.qn[a] * g_qn[a];
    for (int a = 0; a < 4; ++a) grads.rotations[4 * i + a] += (g_qn[a] - pr.qn[a] * dot) / pr.qnorm;
  }
  return grads;
}

template <class T>
GaussianSet<T> render_backward(const GaussianSet<T>& set, const Camera& cam, const RenderSettings& st,
                               const Image<T>& grad_image) {
  return render_backward(set, cam, st, render(set, cam, st), grad_image);
}

#define LODHEAD_INSTANTIATE_SPLAT(T)                                                                              \
  template struct GaussianSet<T>;                                                                                 \
  template Mat3T<T> covariance_from_sq<T>(const std::array<T, 3>&, const std::array<T, 4>&);                      \
  template T evaluate_gaussian<T>(const Vec3T<T>&, const Vec3T<T>&, const Mat3T<T>&);                             \
  template std::optional<SplatPrimitive<T>> project<T>(const GaussianSet<T>&, std::size_t, const Camera&,          \
                                                       const RenderSettings&);                                    \
  template RenderResult<T> render<T>(const GaussianSet<T>&, const Camera&, const RenderSettings&);                \
  template RenderResult<T> render_reference<T>(const GaussianSet<T>&, const Camera&, const RenderSettings&);      \
  template GaussianSet<T> render_backward<T>(const GaussianSet<T>&, const Camera&, const RenderSettings&,         \
                                             const RenderResult<T>&, const Image<T>&);                            \
  template GaussianSet<T> render_backward<T>(const GaussianSet<T>&, const Camera&, const RenderSettings&,         \
                                             const Image<T>&);

LODHEAD_INSTANTIATE_SPLAT(float)
LODHEAD_INSTANTIATE_SPLAT(double)

}  // namespace lodhead
