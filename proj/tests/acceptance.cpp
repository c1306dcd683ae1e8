// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance runner. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Artifacts (dataset, checkpoint, loss
// curve, sweep and bench reports) land in --workdir.

#include <CLI11.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lodhead/bench.hpp"
#include "lodhead/checkpoint.hpp"
#include "lodhead/dataset.hpp"
#include "lodhead/errors.hpp"
#include "lodhead/image_io.hpp"
#include "lodhead/metrics.hpp"
#include "lodhead/pipeline.hpp"
#include "lodhead/splat.hpp"
#include "lodhead/trainer.hpp"
#include "lodhead/uv_field.hpp"

using namespace lodhead;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double max_rel_error(const std::vector<double>& a, const std::vector<double>& b, double floor) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max({std::abs(a[i]), std::abs(b[i]), floor}));
  return worst;
}

double central_difference(double& x, double h, const std::function<double()>& f) {
  const double saved = x;
  x = saved + h;
  const double fp = f();
  x = saved - h;
  const double fm = f();
  x = saved;
  return (fp - fm) / (2.0 * h);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::array<double, 4> random_unit_quaternion(Rng& rng) {
  std::array<double, 4> q;
  double n = 0;
  for (double& v : q) {
    v = rng.uniform(-1, 1);
    n += v * v;
  }
  for (double& v : q) v /= std::sqrt(n);
  return q;
}

GaussianSet<double> random_scene(Rng& rng, std::size_t n, int sh_degree, double spread, double depth_lo,
                                 double depth_hi, double scale_lo, double scale_hi) {
  GaussianSet<double> g;
  g.sh_degree = sh_degree;
  g.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = rng.uniform(depth_lo, depth_hi);
    g.means[3 * i] = rng.uniform(-spread, spread) * z;
    g.means[3 * i + 1] = rng.uniform(-spread, spread) * z;
    g.means[3 * i + 2] = z;
    for (int a = 0; a < 3; ++a) g.scales[3 * i + a] = rng.uniform(scale_lo, scale_hi);
    const auto q = random_unit_quaternion(rng);
    std::copy(q.begin(), q.end(), &g.rotations[4 * i]);
    g.opacities[i] = rng.uniform(0.2, 0.9);
    for (int k = 0; k < g.sh_stride(); ++k) g.sh[i * g.sh_stride() + k] = rng.uniform(-0.4, 0.4);
  }
  return g;
}

Camera axis_camera(int size, double f) {
  Camera c;
  c.fx = c.fy = f;
  c.cx = c.cy = size / 2.0;
  c.width = c.height = size;
  return c;
}

// Settings for the trained desk model.
struct DeskSetup {
  SyntheticOptions data;
  ModelConfig model;
  TrainConfig train;
};

DeskSetup desk_setup(int stage1, int stage2) {
  DeskSetup d;
  d.data.seed = 7;
  d.data.n_frames = 8;
  d.data.image_size = 64;
  d.model.s_max = 64;
  d.model.s_min = 16;
  d.data.resolution = d.model.s_max;
  d.model.decoder.hidden_width = 64;
  d.train.stage1_steps = stage1;
  d.train.stage2_steps = stage2;
  return d;
}

// ---------------------------------------------------------------- criteria

Outcome blend_weight_suite() {
  Rng rng(2024);
  int failures = 0;
  double worst_sum = 0;
  for (int draw = 0; draw < 1000; ++draw) {
    const int n = 2 + static_cast<int>(rng.below(4));
    std::set<int> unique;
    while (static_cast<int>(unique.size()) < n) unique.insert(4 + static_cast<int>(rng.below(509)));
    const std::vector<int> res(unique.begin(), unique.end());
    const int target = 2 + static_cast<int>(rng.below(600));
    const double tau = rng.uniform(0.05, 2.0);
    const auto w = blend_weights(res, target, tau);
    double sum = 0;
    for (double v : w) {
      sum += v;
      if (!(v > 0)) ++failures;
    }
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    std::size_t nearest = 0;
    for (std::size_t i = 1; i < res.size(); ++i)
      if (std::abs(std::log(double(res[i]) / target)) < std::abs(std::log(double(res[nearest]) / target))) nearest = i;
    if (*std::max_element(w.begin(), w.end()) != w[nearest]) ++failures;

    // Mirrored pair around the target in log space: r = a, a*m*m with S = a*m.
    const int a = 2 + static_cast<int>(rng.below(30)), m = 2 + static_cast<int>(rng.below(4));
    std::vector<int> pair{a, a * m * m};
    if (rng.below(2)) pair.push_back(a * m * m * m * m);
    const auto t = blend_weights(pair, a * m, tau);
    if (t[0] != t[1]) ++failures;
  }
  const bool ok = failures == 0 && worst_sum <= 1e-12;
  return {ok, fmt("1000 draws, %d property violations, max |sum-1| = %.2e", failures, worst_sum)};
}

Outcome resolution_formula() {
  const bool ends = resolution_for_lod(0.0, 256, 64) == 256 && resolution_for_lod(1.0, 256, 64) == 64;
  int violations = 0;
  int prev = resolution_for_lod(0.0, 256, 64);
  for (int i = 1; i <= 1000; ++i) {
    const int s = resolution_for_lod(i / 1000.0, 256, 64);
    if (s > prev) ++violations;
    prev = s;
  }
  return {ends && violations == 0, fmt("S(0)=%d S(1)=%d, %d monotonicity violations over 1001 points",
                                       resolution_for_lod(0.0, 256, 64), resolution_for_lod(1.0, 256, 64), violations)};
}

double resample_gradient_error() {
  Rng rng(31);
  std::vector<FeatureMap<double>> levels;
  for (int r : {8, 16, 32}) {
    FeatureMap<double> m(r, 2);
    for (double& v : m.data) v = rng.uniform(-1, 1);
    levels.push_back(std::move(m));
  }
  FeatureField<double> f(std::move(levels), 0.35, 8, 32);
  double worst = 0;
  for (double lod : {0.0, 0.41, 1.0}) {
    FeatureMap<double> g(f.resolution_for(lod), 2);
    for (double& v : g.data) v = rng.uniform(-1, 1);
    const auto grads = f.resample_backward(lod, g);
    std::vector<double> analytic, numeric;
    for (std::size_t l = 0; l < f.levels().size(); ++l)
      for (int probe = 0; probe < 20; ++probe) {
        const std::size_t i = rng.below(f.levels()[l].data.size());
        analytic.push_back(grads[l].data[i]);
        numeric.push_back(central_difference(f.levels()[l].data[i], 1e-5, [&] { return dot(f.resample(lod).data, g.data); }));
      }
    worst = std::max(worst, max_rel_error(analytic, numeric, 1e-3));
  }
  return worst;
}

double mlp_gradient_error() {
  const Activation all[] = {Activation::identity, Activation::relu, Activation::tanh, Activation::sigmoid,
                            Activation::exponential};
  double worst = 0;
  for (Activation hidden : all)
    for (Activation output : all) {
      Rng rng(7 + 5 * static_cast<int>(hidden) + static_cast<int>(output));
      const std::vector<int> dims{5, 7, 6, 4};
      auto net = Mlp<double>::create(dims, hidden, output, rng, 0.5);
      for (auto& l : net.layers())
        for (double& b : l.bias) b = rng.uniform(-0.2, 0.2);
      Matrix<double> x(3, 5), gout(3, 4);
      for (double& v : x.data) v = rng.uniform(-1, 1);
      for (double& v : gout.data) v = rng.uniform(-1, 1);
      typename Mlp<double>::Cache cache;
      net.forward(x, &cache);
      auto g = net.make_gradients();
      const auto gx = net.backward(cache, gout, g);
      const auto loss = [&] { return dot(net.forward(x).data, gout.data); };
      std::vector<double> analytic, numeric;
      for (std::size_t li = 0; li < net.layers().size(); ++li) {
        auto& layer = net.layers()[li];
        for (std::size_t i = 0; i < layer.weight.size(); ++i) {
          analytic.push_back(g.weight[li][i]);
          numeric.push_back(central_difference(layer.weight[i], 1e-5, loss));
        }
        for (std::size_t i = 0; i < layer.bias.size(); ++i) {
          analytic.push_back(g.bias[li][i]);
          numeric.push_back(central_difference(layer.bias[i], 1e-5, loss));
        }
      }
      for (std::size_t i = 0; i < x.data.size(); ++i) {
        analytic.push_back(gx.data[i]);
        numeric.push_back(central_difference(x.data[i], 1e-5, loss));
      }
      worst = std::max(worst, max_rel_error(analytic, numeric, 1e-4));
    }
  return worst;
}

double render_gradient_error() {
  double worst = 0;
  for (int scene = 0; scene < 8; ++scene) {
    Rng rng(500 + scene);
    auto g = random_scene(rng, 2 + rng.below(15), scene % 4, 0.25, 1.0, 2.5, 0.03, 0.12);
    const Camera cam = axis_camera(20, 22.0);
    RenderSettings st;
    st.background = {rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1)};
    Image<double> gi(cam.width, cam.height);
    for (double& v : gi.data) v = rng.uniform(-1, 1);
    const auto fwd = render(g, cam, st);
    const auto grad = render_backward(g, cam, st, fwd, gi);
    const auto objective = [&] { return dot(render(g, cam, st).image.data, gi.data); };
    std::vector<double> analytic, numeric;
    auto probe = [&](std::vector<double>& values, const std::vector<double>& grads) {
      for (std::size_t i = 0; i < values.size(); ++i) {
        analytic.push_back(grads[i]);
        numeric.push_back(central_difference(values[i], 1e-6, objective));
      }
    };
    probe(g.means, grad.means);
    probe(g.scales, grad.scales);
    probe(g.rotations, grad.rotations);
    probe(g.opacities, grad.opacities);
    probe(g.sh, grad.sh);
    worst = std::max(worst, max_rel_error(analytic, numeric, 1e-3));
  }
  return worst;
}

AvatarModel<double> chain_model() {
  ModelConfig cfg;
  cfg.s_max = 4;
  cfg.s_min = 2;
  cfg.field_levels = 2;
  cfg.seed = 13;
  auto& d = cfg.decoder;
  d.feature_dim = 4;
  d.n_freq = 2;
  d.driving_dim = 3;
  d.expr_dim = 5;
  d.mapper_hidden = 6;
  d.hidden_width = 8;
  d.hidden_layers = 2;
  d.sh_degree = 1;
  d.output_gain = 1.0;
  Mesh m;
  m.vertices = {Vec3(-0.5, -0.5, 0), Vec3(0.5, -0.5, 0), Vec3(0.5, 0.5, 0.1), Vec3(-0.5, 0.5, 0.05)};
  m.uvs = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
  m.faces = {{0, 1, 2}, {0, 2, 3}};
  m.blendshapes = {{Vec3(0, 0, 0.1), Vec3(0, 0, 0), Vec3(0, 0, -0.1), Vec3(0, 0, 0.05)},
                   {Vec3(0.05, 0, 0), Vec3(0, 0.05, 0), Vec3(0, 0, 0), Vec3(-0.05, 0, 0)}};
  auto model = AvatarModel<double>::create(cfg, std::move(m));
  Rng rng(14);
  for (auto& level : model.field.levels())
    for (double& v : level.data) v = rng.uniform(-1, 1);
  for (auto& head : model.heads)
    for (auto& l : head.layers())
      for (double& b : l.bias) b = rng.uniform(-0.1, 0.1);
  for (double& b : model.heads[kScaleHead].layers().back().bias) b = -0.7;
  for (double& b : model.heads[kOpacityHead].layers().back().bias) b = -0.5;
  return model;
}

double chain_gradient_error() {
  auto model = chain_model();
  const Camera cam = Camera::look_at(Vec3(0.15, -0.1, 2.2), Vec3(0, 0, 0.05), 0.6, 24, 20);
  RenderSettings settings;
  settings.background = {0.2, 0.4, 0.9};
  const ExpressionVector expr{0.3, -0.5, 0.2, 0.7, -0.1};
  double worst = 0;
  for (double lod : {0.0, 0.6, 1.0}) {
    Rng rng(90 + static_cast<int>(lod * 10));
    const auto fwd = forward_frame(model, expr, cam, lod, settings);
    Image<double> gi(cam.width, cam.height);
    for (double& v : gi.data) v = rng.uniform(-1, 1);
    std::vector<double> go(fwd.decoded.offsets.size()), gs(fwd.decoded.gaussians.scales.size());
    for (double& v : go) v = rng.uniform(-1, 1);
    for (double& v : gs) v = rng.uniform(-1, 1);
    const auto objective = [&] {
      const auto f = forward_frame(model, expr, cam, lod, settings);
      return dot(f.render.image.data, gi.data) + dot(f.decoded.offsets, go) + dot(f.decoded.gaussians.scales, gs);
    };
    auto grads = ModelGradients<double>::zeros_like(model);
    backward_frame(model, fwd, cam, settings, gi, go, gs, grads, true);
    std::vector<double> analytic, numeric;
    for (std::size_t l = 0; l < model.field.levels().size(); ++l)
      for (std::size_t i = 0; i < model.field.levels()[l].data.size(); ++i) {
        analytic.push_back(grads.field[l].data[i]);
        numeric.push_back(central_difference(model.field.levels()[l].data[i], 1e-5, objective));
      }
    for (std::size_t li = 0; li < model.mapper.layers().size(); ++li) {
      auto& layer = model.mapper.layers()[li];
      for (std::size_t i = 0; i < layer.weight.size(); i += 3) {
        analytic.push_back(grads.mapper.weight[li][i]);
        numeric.push_back(central_difference(layer.weight[i], 1e-5, objective));
      }
    }
    for (int h = 0; h < kHeadCount; ++h) {
      auto& first = model.heads[h].layers().front();
      for (std::size_t i = 0; i < first.weight.size(); i += 5) {
        analytic.push_back(grads.heads[h].weight[0][i]);
        numeric.push_back(central_difference(first.weight[i], 1e-5, objective));
      }
      auto& last = model.heads[h].layers().back();
      for (std::size_t i = 0; i < last.bias.size(); ++i) {
        analytic.push_back(grads.heads[h].bias.back()[i]);
        numeric.push_back(central_difference(last.bias[i], 1e-5, objective));
      }
    }
    worst = std::max(worst, max_rel_error(analytic, numeric, 1e-4));
  }
  return worst;
}

Outcome gradient_suite() {
  const double e_field = resample_gradient_error();
  const double e_mlp = mlp_gradient_error();
  const double e_render = render_gradient_error();
  const double e_chain = chain_gradient_error();
  const bool ok = e_field < 1e-5 && e_mlp < 1e-5 && e_render < 1e-4 && e_chain < 1e-5;
  return {ok, fmt("max rel error: resample %.1e, mlp %.1e, render %.1e, full chain %.1e", e_field, e_mlp, e_render,
                  e_chain)};
}

Outcome renderer_oracle() {
  double worst = 0;
  for (int scene = 0; scene < 50; ++scene) {
    Rng rng(3000 + scene);
    const auto g = random_scene(rng, 1 + rng.below(256), static_cast<int>(rng.below(4)), 0.6, 0.8, 4.0, 0.01, 0.2);
    const Camera cam = axis_camera(64, 40.0);
    const auto a = render(g, cam), b = render_reference(g, cam);
    for (std::size_t i = 0; i < a.image.data.size(); ++i)
      worst = std::max(worst, std::abs(a.image.data[i] - b.image.data[i]));
  }
  return {worst < 1e-5, fmt("50 scenes, max channel deviation %.2e", worst)};
}

Outcome gaussian_unit_checks() {
  Rng rng(77);
  bool peak = true, symmetric = true;
  double worst_eig = 0;
  for (int t = 0; t < 200; ++t) {
    const std::array<double, 3> s{rng.uniform(0.01, 2), rng.uniform(0.01, 2), rng.uniform(0.01, 2)};
    const auto sigma = covariance_from_sq<double>(s, random_unit_quaternion(rng));
    symmetric = symmetric && (sigma - sigma.transpose()).norm() == 0.0;
    Eigen::SelfAdjointEigenSolver<Mat3T<double>> es(sigma);
    std::array<double, 3> want{s[0] * s[0], s[1] * s[1], s[2] * s[2]};
    std::sort(want.begin(), want.end());
    for (int k = 0; k < 3; ++k) worst_eig = std::max(worst_eig, std::abs(es.eigenvalues()[k] - want[k]));
    const Vec3T<double> mu(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    peak = peak && evaluate_gaussian<double>(mu, mu, sigma) == 1.0;
  }
  return {peak && symmetric && worst_eig < 1e-9,
          fmt("G(mu)=1: %s, symmetric: %s, max eigenvalue error %.1e", peak ? "yes" : "no", symmetric ? "yes" : "no",
              worst_eig)};
}

Outcome count_ratio(const DeskSetup& desk) {
  const auto mesh = make_desk_head(desk.data.head);
  const std::size_t n0 = gaussian_count(rasterize_uv(mesh, mesh.vertices, resolution_for_lod(0.0, desk.model.s_max, desk.model.s_min)));
  const std::size_t n1 = gaussian_count(rasterize_uv(mesh, mesh.vertices, resolution_for_lod(1.0, desk.model.s_max, desk.model.s_min)));
  const double ratio = double(n1) / double(n0);
  return {ratio >= 0.04 && ratio <= 0.09, fmt("count(l=1)/count(l=0) = %zu/%zu = %.4f", n1, n0, ratio)};
}

struct TrainedDesk {
  Dataset data;
  AvatarModel<float> model;
  FrameMetrics l0, l1;
  std::uint64_t mapper_before = 0, mapper_after = 0;
  double seconds = 0;
};

TrainedDesk train_desk(const DeskSetup& desk, const fs::path& workdir) {
  TrainedDesk t;
  t.data = generate_synthetic_dataset(desk.data);
  save_dataset(t.data, workdir / "dataset");
  t.model = AvatarModel<float>::create(desk.model, t.data.mesh);
  Trainer<float> trainer(t.model, desk.train);
  const auto start = std::chrono::steady_clock::now();
  auto report = [&](int stage, int step) {
    const auto m0 = evaluate_dataset(t.model, t.data.frames, 0.0), m1 = evaluate_dataset(t.model, t.data.frames, 1.0);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("  [train] stage %d step %5d  l0 %.2f dB / %.4f  l1 %.2f dB / %.4f  (%.0f s)\n", stage, step, m0.psnr,
                m0.ssim, m1.psnr, m1.ssim, s);
    std::fflush(stdout);
  };
  const int chunk = 500;
  for (int s = 0; s < desk.train.stage1_steps; s += chunk) {
    trainer.run_stage1(t.data.frames, std::min(chunk, desk.train.stage1_steps - s));
    report(1, std::min(s + chunk, desk.train.stage1_steps));
  }
  t.mapper_before = mapper_hash(t.model);
  for (int s = 0; s < desk.train.stage2_steps; s += chunk) {
    trainer.run_stage2(t.data.frames, std::min(chunk, desk.train.stage2_steps - s));
    report(2, std::min(s + chunk, desk.train.stage2_steps));
  }
  t.mapper_after = mapper_hash(t.model);
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  trainer.write_loss_csv(workdir / "loss.csv");
  save_checkpoint(t.model, workdir / "desk.ckpt");
  t.l0 = evaluate_dataset(t.model, t.data.frames, 0.0);
  t.l1 = evaluate_dataset(t.model, t.data.frames, 1.0);
  return t;
}

Outcome desk_overfit(const TrainedDesk& t) {
  const double psnr_drop = 1.0 - t.l1.psnr / t.l0.psnr;
  const double ssim_drop = 1.0 - t.l1.ssim / t.l0.ssim;
  const bool ok = t.l0.psnr >= 30.0 && t.l0.ssim >= 0.90 && psnr_drop <= 0.10 && ssim_drop <= 0.05;
  return {ok, fmt("l=0 %.2f dB / SSIM %.4f; l=1 %.2f dB / SSIM %.4f; drop PSNR %.1f%% SSIM %.1f%%; %.1f min",
                  t.l0.psnr, t.l0.ssim, t.l1.psnr, t.l1.ssim, 100 * psnr_drop, 100 * ssim_drop, t.seconds / 60)};
}

double multi_lod_sum_error() {
  SyntheticOptions o;
  o.n_frames = 1;
  o.image_size = 32;
  o.resolution = 16;
  o.expr_dim = 12;
  const auto data = generate_synthetic_dataset(o);
  ModelConfig mc;
  mc.s_max = 16;
  mc.s_min = 6;
  mc.decoder.expr_dim = 12;
  mc.decoder.hidden_width = 32;
  mc.decoder.feature_dim = 16;
  mc.decoder.n_freq = 4;
  mc.decoder.mapper_hidden = 16;
  auto model = AvatarModel<double>::create(mc, data.mesh);
  {
    Trainer<double> warm(model, TrainConfig{});
    warm.run_stage1(data.frames, 5);
  }
  Trainer<double> tr(model, TrainConfig{});
  const std::vector<double> lods{0.0, 1.0, 0.35, 0.8};
  const auto joint = tr.evaluate(data.frames[0], lods, false);
  auto sum = ModelGradients<double>::zeros_like(model);
  for (double l : lods) sum.add(tr.evaluate(data.frames[0], {l}, false).grads);
  double worst = 0;
  const auto a = joint.grads.field_blocks(), b = sum.field_blocks();
  const auto c = joint.grads.network_blocks(false), d = sum.network_blocks(false);
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t i = 0; i < a[k].size(); ++i) worst = std::max(worst, std::abs(a[k][i] - b[k][i]));
  for (std::size_t k = 0; k < c.size(); ++k)
    for (std::size_t i = 0; i < c[k].size(); ++i) worst = std::max(worst, std::abs(c[k][i] - d[k][i]));
  return worst;
}

Outcome stage2_contracts(const TrainedDesk& t) {
  const double err = multi_lod_sum_error();
  const bool frozen = t.mapper_before == t.mapper_after;
  return {frozen && err < 1e-10, fmt("mapper hash %016llx -> %016llx (%s); |joint - sum of per-LOD| = %.1e",
                                     static_cast<unsigned long long>(t.mapper_before),
                                     static_cast<unsigned long long>(t.mapper_after), frozen ? "unchanged" : "CHANGED",
                                     err)};
}

Outcome performance_trend(const TrainedDesk& t, const fs::path& workdir) {
  BenchOptions opts;
  opts.warmup = 2;
  opts.iters = 10;
  const auto report = run_bench(t.model, t.data.frames, opts);
  report.write_csv(workdir / "bench.csv");
  bool decreasing = report.rows.size() == 5;
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    decreasing = decreasing && report.rows[i].gaussian_count < report.rows[i - 1].gaussian_count;
  const double ratio = report.rows.back().mean_ms / report.rows.front().mean_ms;
  std::string counts;
  for (const auto& r : report.rows) counts += fmt("%s%zu", counts.empty() ? "" : "/", r.gaussian_count);
  return {decreasing && ratio <= 0.6, fmt("counts %s; mean ms l=0 %.2f, l=1 %.2f, ratio %.2f", counts.c_str(),
                                          report.rows.front().mean_ms, report.rows.back().mean_ms, ratio)};
}

Outcome lod_continuity(const TrainedDesk& t, const fs::path& workdir) {
  const auto& frame = t.data.frames.front();
  std::vector<Image<float>> renders;
  const auto lods = default_sweep_lods();
  const auto rows = run_sweep(t.model, frame.expr, frame.camera, lods, {}, &renders);
  write_sweep_csv(workdir / "sweep.csv", rows);
  write_png(workdir / "sweep_strip.png", hstack(renders));
  bool finite = true;
  double worst_vs_l0 = 0, worst_vs_target = 0;
  std::vector<double> target_psnr;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    finite = finite && std::isfinite(rows[i].psnr);
    target_psnr.push_back(psnr(renders[i], frame.image));
    finite = finite && std::isfinite(target_psnr.back());
  }
  // Row 0 compares l = 0 with itself and sits at the cap; drops start at row 1.
  for (std::size_t i = 2; i < rows.size(); ++i) worst_vs_l0 = std::max(worst_vs_l0, rows[i - 1].psnr - rows[i].psnr);
  for (std::size_t i = 1; i < rows.size(); ++i)
    worst_vs_target = std::max(worst_vs_target, target_psnr[i - 1] - target_psnr[i]);
  const bool ok = finite && worst_vs_l0 < 3.0 && worst_vs_target < 3.0;
  return {ok, fmt("21 LODs, finite: %s; max adjacent drop %.2f dB vs l=0, %.2f dB vs target (l=0.05: %.2f dB vs l=0)",
                  finite ? "yes" : "no", worst_vs_l0, worst_vs_target, rows[1].psnr)};
}

Outcome serialization(const TrainedDesk& t, const fs::path& workdir) {
  const auto a = workdir / "roundtrip_a.ckpt", b = workdir / "roundtrip_b.ckpt";
  save_checkpoint(t.model, a);
  const auto back = load_checkpoint(a);
  save_checkpoint(back, b);
  const auto bytes = serialize_checkpoint(t.model);
  const bool identical = serialize_checkpoint(back) == bytes;

  int typed = 0, untyped = 0, accepted = 0;
  auto attempt = [&](const std::vector<std::uint8_t>& blob) {
    try {
      deserialize_checkpoint(blob);
      ++accepted;
    } catch (const CheckpointError&) {
      ++typed;
    } catch (...) {
      ++untyped;
    }
  };
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    auto blob = bytes;
    blob[rng.below(blob.size())] ^= static_cast<std::uint8_t>(1 + rng.below(255));
    attempt(blob);
    attempt(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + static_cast<long>(rng.below(bytes.size()))));
  }
  bool kinds = true;
  auto expect_kind = [&](std::vector<std::uint8_t> blob, CheckpointError::Kind kind) {
    try {
      deserialize_checkpoint(blob);
      kinds = false;
    } catch (const CheckpointError& e) {
      kinds = kinds && e.kind() == kind;
    }
  };
  auto magic = bytes;
  magic[1] ^= 0xff;
  expect_kind(magic, CheckpointError::Kind::bad_magic);
  auto version = bytes;
  version[4] += 1;
  expect_kind(version, CheckpointError::Kind::bad_version);
  expect_kind({bytes.begin(), bytes.begin() + static_cast<long>(bytes.size() / 3)}, CheckpointError::Kind::truncated);
  const bool ok = identical && untyped == 0 && accepted == 0 && kinds;
  return {ok, fmt("round trip %s (%zu bytes); 400 corruptions: %d typed, %d untyped, %d accepted; kinds %s",
                  identical ? "bit-exact" : "DIFFERS", bytes.size(), typed, untyped, accepted, kinds ? "ok" : "wrong")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lodhead acceptance runner"};
  fs::path workdir = "acceptance_run";
  int stage1 = 2000, stage2 = 3000;
  app.add_option("--workdir", workdir, "directory for artifacts");
  app.add_option("--stage1-steps", stage1, "stage-1 steps of the desk run");
  app.add_option("--stage2-steps", stage2, "stage-2 steps of the desk run");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(workdir);

  const DeskSetup desk = desk_setup(stage1, stage2);
  std::printf("# %s\n", environment_description().c_str());
  std::printf("# desk: %dx%d images, %d frames, S %d..%d, width %d, steps %d + %d\n", desk.data.image_size,
              desk.data.image_size, desk.data.n_frames, desk.model.s_max, desk.model.s_min,
              desk.model.decoder.hidden_width, stage1, stage2);
  std::fflush(stdout);

  int failed = 0;
  std::ofstream summary(workdir / "acceptance.txt");
  auto emit = [&](int id, const char* name, double budget_s, const std::function<Outcome()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = budget_s <= 0 || secs <= budget_s;
    const bool pass = out.pass && in_time;
    if (!pass) ++failed;
    const std::string line = fmt("%s %2d %-26s %s [%.2f s%s]", pass ? "PASS" : "FAIL", id, name, out.detail.c_str(),
                                 secs, in_time ? "" : ", over budget");
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    summary << line << '\n';
  };

  emit(1, "blend-weight suite", 1.0, blend_weight_suite);
  emit(2, "resolution formula", 1.0, resolution_formula);
  emit(3, "gradient suite", 120.0, gradient_suite);
  emit(4, "renderer oracle", 60.0, renderer_oracle);
  emit(5, "gaussian unit checks", 1.0, gaussian_unit_checks);
  emit(6, "gaussian count ratio", 5.0, [&] { return count_ratio(desk); });

  std::optional<TrainedDesk> trained;
  std::string train_error;
  try {
    trained = train_desk(desk, workdir);
  } catch (const std::exception& e) {
    train_error = e.what();
  }
  auto needs_model = [&](auto fn) {
    return [&, fn]() -> Outcome {
      if (!trained) return {false, "desk training failed: " + train_error};
      return fn(*trained);
    };
  };
  // The runtime target for the desk run assumes a multicore CPU; it is reported, not enforced.
  emit(7, "desk-scale overfit", 0, needs_model([](const TrainedDesk& t) { return desk_overfit(t); }));
  emit(8, "stage-2 contracts", 0, needs_model([](const TrainedDesk& t) { return stage2_contracts(t); }));
  emit(9, "performance trend", 300.0, needs_model([&](const TrainedDesk& t) { return performance_trend(t, workdir); }));
  emit(10, "LOD continuity", 300.0, needs_model([&](const TrainedDesk& t) { return lod_continuity(t, workdir); }));
  emit(11, "serialization", 10.0, needs_model([&](const TrainedDesk& t) { return serialization(t, workdir); }));

  std::printf("%s: %d of 11 criteria failed\n", failed ? "FAIL" : "PASS", failed);
  return failed ? 1 : 0;
}
