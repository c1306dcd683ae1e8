// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0
//
// lodhead: train, render, sweep, benchmark and export continuous-LOD
// Gaussian head avatars.
//
// Exit codes: 0 success, 1 unexpected failure, 2 configuration error,
// 3 data error (missing/corrupt files, dimension mismatch), 4 divergence.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "lodhead/bench.hpp"
#include "lodhead/checkpoint.hpp"
#include "lodhead/config.hpp"
#include "lodhead/dataset.hpp"
#include "lodhead/errors.hpp"
#include "lodhead/export.hpp"
#include "lodhead/image_io.hpp"
#include "lodhead/pipeline.hpp"
#include "lodhead/trainer.hpp"

namespace fs = std::filesystem;
using namespace lodhead;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kData = 3, kDiverged = 4 };

struct ViewArgs {
  std::string dataset;
  int frame = 0;
  int image_size = 64;
  double yaw = 0.0;
  double pitch = 0.0;
};

void add_view_options(CLI::App* cmd, ViewArgs& v) {
  cmd->add_option("--dataset", v.dataset, "dataset directory supplying expressions and cameras (any identity)");
  cmd->add_option("--frame", v.frame, "frame index within --dataset")->check(CLI::NonNegativeNumber);
  cmd->add_option("--image-size", v.image_size, "image side for the default camera when no dataset is given")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--yaw", v.yaw, "orbit yaw offset in radians");
  cmd->add_option("--pitch", v.pitch, "orbit pitch offset in radians");
}

// Expression and camera for one frame, validated against the model.
FrameSample resolve_view(const AvatarModel<float>& model, const ViewArgs& v) {
  FrameSample s;
  if (!v.dataset.empty()) {
    Dataset data = load_dataset(v.dataset);
    if (v.frame >= static_cast<int>(data.frames.size()))
      throw DataError("frame " + std::to_string(v.frame) + " out of range (dataset has " +
                      std::to_string(data.frames.size()) + ")");
    s = std::move(data.frames[v.frame]);
  } else {
    SyntheticOptions opts;
    opts.image_size = v.image_size;
    s.camera = synthetic_base_camera(model.mesh, opts);
    s.expr.assign(static_cast<std::size_t>(model.config.decoder.expr_dim), 0.0);
  }
  if (static_cast<int>(s.expr.size()) != model.config.decoder.expr_dim)
    throw DataError("expression dimension " + std::to_string(s.expr.size()) + " does not match the model's " +
                    std::to_string(model.config.decoder.expr_dim));
  s.camera = orbit_camera(s.camera, v.yaw, v.pitch, bounding_box_center(model.mesh.vertices));
  return s;
}

void check_lod(double lod) {
  if (!(lod >= 0.0 && lod <= 1.0)) throw ConfigError("lod must lie in [0, 1], got " + std::to_string(lod));
}

std::vector<double> parse_lod_list(const std::string& text) {
  if (text.empty()) return default_sweep_lods();
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("invalid lod value '" + item + "'");
    }
    check_lod(out.back());
  }
  if (out.empty()) throw ConfigError("empty lod list");
  return out;
}

int cmd_train(const std::string& config_path) {
  const RunConfig cfg = load_run_config(config_path);
  Dataset data;
  if (cfg.generate) {
    data = generate_synthetic_dataset(cfg.synthetic);
    if (!cfg.dataset.empty()) save_dataset(data, cfg.dataset);
  } else {
    data = load_dataset(cfg.dataset);
  }
  if (data.frames.empty()) throw DataError("dataset has no frames");
  for (const auto& f : data.frames)
    if (static_cast<int>(f.expr.size()) != cfg.model.decoder.expr_dim)
      throw DataError("dataset expression dimension does not match expr_dim");

  AvatarModel<float> model = AvatarModel<float>::create(cfg.model, data.mesh);
  Trainer<float> trainer(model, cfg.train);
  const auto start = std::chrono::steady_clock::now();
  if (cfg.log_every > 0) {
    trainer.on_step = [&](const LossRecord& r) {
      if (r.step % cfg.log_every == 0) {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("stage %d step %5d  total %.5f  rgb %.5f  (%.0fs)\n", r.stage, r.step, r.total, r.rgb, secs);
        std::fflush(stdout);
      }
    };
  }
  trainer.run(data.frames);
  save_checkpoint(model, cfg.checkpoint);
  if (!cfg.loss_csv.empty()) trainer.write_loss_csv(cfg.loss_csv);

  const FrameMetrics m0 = evaluate_dataset(model, data.frames, 0.0, cfg.train.render);
  const FrameMetrics m1 = evaluate_dataset(model, data.frames, 1.0, cfg.train.render);
  const auto& h = trainer.history();
  if (!h.empty()) std::printf("loss: first %.6f  last %.6f  (%zu steps)\n", h.front().total, h.back().total, h.size());
  std::printf("train frames  l=0: PSNR %.2f dB  SSIM %.4f  L1 %.4f\n", m0.psnr, m0.ssim, m0.l1);
  std::printf("train frames  l=1: PSNR %.2f dB  SSIM %.4f  L1 %.4f\n", m1.psnr, m1.ssim, m1.l1);
  std::printf("checkpoint written to %s\n", cfg.checkpoint.string().c_str());
  return kOk;
}

int cmd_render(const std::string& ckpt, const ViewArgs& view, double lod, const std::string& out) {
  check_lod(lod);
  const AvatarModel<float> model = load_checkpoint(ckpt);
  const FrameSample s = resolve_view(model, view);
  write_png(out, render_frame(model, s.expr, s.camera, lod));
  std::printf("lod %.4f  resolution %d  gaussians %zu  -> %s\n", lod, model.field.resolution_for(lod),
              model.gaussian_count_at(lod), out.c_str());
  return kOk;
}

int cmd_sweep(const std::string& ckpt, const ViewArgs& view, const std::string& lods_text, const std::string& out_dir,
              bool strip) {
  const std::vector<double> lods = parse_lod_list(lods_text);
  const AvatarModel<float> model = load_checkpoint(ckpt);
  const FrameSample s = resolve_view(model, view);
  std::vector<Image<float>> renders;
  const auto rows = run_sweep(model, s.expr, s.camera, lods, {}, &renders);
  fs::create_directories(out_dir);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "lod_%03d.png", static_cast<int>(std::lround(rows[i].lod * 1000)));
    write_png(fs::path(out_dir) / name, renders[i]);
  }
  if (strip) write_png(fs::path(out_dir) / "strip.png", hstack(renders));
  write_sweep_csv(fs::path(out_dir) / "sweep.csv", rows);
  for (const auto& r : rows)
    std::printf("lod %.3f  S %3d  gaussians %6zu  PSNR %.2f\n", r.lod, r.resolution, r.gaussian_count, r.psnr);
  return kOk;
}

int cmd_bench(const std::string& ckpt, const ViewArgs& view, const std::string& lods_text, int n_frames, int warmup,
              int iters, const std::string& out) {
  BenchOptions opts;
  opts.lods = lods_text.empty() ? std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0} : parse_lod_list(lods_text);
  opts.warmup = warmup;
  opts.iters = iters;
  const AvatarModel<float> model = load_checkpoint(ckpt);
  std::vector<FrameSample> frames;
  if (!view.dataset.empty()) {
    Dataset data = load_dataset(view.dataset);
    for (int i = 0; i < n_frames && i < static_cast<int>(data.frames.size()); ++i) frames.push_back(data.frames[i]);
    for (const auto& f : frames)
      if (static_cast<int>(f.expr.size()) != model.config.decoder.expr_dim)
        throw DataError("dataset expression dimension does not match the model");
  } else {
    frames.push_back(resolve_view(model, view));
  }
  const BenchReport report = run_bench(model, frames, opts);
  if (!out.empty()) report.write_csv(out);
  std::cout << report.to_csv();
  return kOk;
}

int cmd_export(const std::string& ckpt, const ViewArgs& view, double lod, const std::string& out) {
  check_lod(lod);
  const AvatarModel<float> model = load_checkpoint(ckpt);
  const FrameSample s = resolve_view(model, view);
  const Decoded<float> d = decode_frame(model, s.expr, lod);
  write_gaussians_ply(out, d.gaussians);
  std::printf("%zu Gaussians -> %s\n", d.gaussians.size(), out.c_str());
  return kOk;
}

int cmd_generate(const SyntheticOptions& opts, const std::string& out) {
  const Dataset data = generate_synthetic_dataset(opts);
  save_dataset(data, out);
  std::printf("%zu frames -> %s\n", data.frames.size(), out.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous level-of-detail Gaussian head avatars"};
  app.require_subcommand(1);

  std::string config_path;
  auto* train = app.add_subcommand("train", "generate or load a dataset, run both training stages, save a checkpoint");
  train->add_option("config", config_path, "key = value configuration file")->required()->check(CLI::ExistingFile);

  std::string ckpt, out, lods_text;
  double lod = 0.0;
  ViewArgs view;
  auto* rend = app.add_subcommand("render", "render one frame at a given LOD");
  rend->add_option("--checkpoint", ckpt, "checkpoint file")->required();
  rend->add_option("--lod", lod, "LOD in [0, 1]")->capture_default_str();
  rend->add_option("--out", out, "output PNG")->required();
  add_view_options(rend, view);

  bool strip = true;
  auto* sweep = app.add_subcommand("sweep", "render a range of LODs with quality relative to l = 0");
  sweep->add_option("--checkpoint", ckpt, "checkpoint file")->required();
  sweep->add_option("--lods", lods_text, "comma-separated LODs (default 0:0.05:1)");
  sweep->add_option("--out-dir", out, "output directory")->required();
  sweep->add_flag("!--no-strip", strip, "skip the side-by-side strip image");
  add_view_options(sweep, view);

  int n_frames = 1, warmup = 2, iters = 10;
  auto* bench = app.add_subcommand("bench", "time resample + decode + rasterize per LOD");
  bench->add_option("--checkpoint", ckpt, "checkpoint file")->required();
  bench->add_option("--lods", lods_text, "comma-separated LODs (default 0,0.25,0.5,0.75,1)");
  bench->add_option("--frames", n_frames, "frames taken from --dataset")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--warmup", warmup, "untimed iterations")->check(CLI::NonNegativeNumber)->capture_default_str();
  bench->add_option("--iters", iters, "timed iterations")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--out", out, "CSV report path (also printed)");
  add_view_options(bench, view);

  auto* exp = app.add_subcommand("export-gaussians", "write the decoded Gaussians of one frame as PLY");
  exp->add_option("--checkpoint", ckpt, "checkpoint file")->required();
  exp->add_option("--lod", lod, "LOD in [0, 1]")->capture_default_str();
  exp->add_option("--out", out, "output PLY")->required();
  add_view_options(exp, view);

  SyntheticOptions gen;
  auto* genc = app.add_subcommand("generate-data", "write a synthetic desk-head dataset");
  genc->add_option("--out", out, "output directory")->required();
  genc->add_option("--seed", gen.seed, "generator seed")->capture_default_str();
  genc->add_option("--frames", gen.n_frames, "frame count")->check(CLI::PositiveNumber)->capture_default_str();
  genc->add_option("--image-size", gen.image_size, "image side in pixels")->capture_default_str();
  genc->add_option("--resolution", gen.resolution, "ground-truth UV resolution (use the model's s_max)")
      ->capture_default_str();
  genc->add_option("--expr-dim", gen.expr_dim, "expression vector size")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*train) return cmd_train(config_path);
    if (*rend) return cmd_render(ckpt, view, lod, out);
    if (*sweep) return cmd_sweep(ckpt, view, lods_text, out, strip);
    if (*bench) return cmd_bench(ckpt, view, lods_text, n_frames, warmup, iters, out);
    if (*exp) return cmd_export(ckpt, view, lod, out);
    if (*genc) return cmd_generate(gen, out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "diverged: %s\n", e.what());
    return kDiverged;
  } catch (const CheckpointError& e) {
    std::fprintf(stderr, "checkpoint error (%s): %s\n", checkpoint_error_name(e.kind()), e.what());
    return kData;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kFailure;
}
