// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lodhead/dataset.hpp"
#include "lodhead/model.hpp"
#include "lodhead/splat.hpp"

namespace lodhead {

struct BenchOptions {
  std::vector<double> lods{0.0, 0.25, 0.5, 0.75, 1.0};
  int warmup = 2;
  int iters = 10;
  RenderSettings render;
};

struct BenchRow {
  double lod = 0;
  int resolution = 0;
  std::size_t gaussian_count = 0;
  double mean_ms = 0;
  double p50_ms = 0;
  double fps = 0;  // 1000 / mean_ms
  double psnr = 0, ssim = 0, l1 = 0;  // against the l = 0 render of the same frame
};

struct BenchReport {
  std::string environment;
  std::vector<BenchRow> rows;  // ascending lod

  void write_csv(const std::filesystem::path& path) const;
  std::string to_csv() const;
};

/// One line describing CPU, active kernel ISA and compiler.
std::string environment_description();

/// Times resample + decode + rasterize per frame (monotonic clock, warmup
/// excluded). Each timed iteration renders every frame once.
BenchReport run_bench(const AvatarModel<float>& model, const std::vector<FrameSample>& frames,
                      const BenchOptions& opts);

struct SweepRow {
  double lod = 0;
  int resolution = 0;
  std::size_t gaussian_count = 0;
  double psnr = 0, ssim = 0, l1 = 0;  // against lod 0
};

/// 0.0, 0.05, ..., 1.0.
std::vector<double> default_sweep_lods();

std::vector<SweepRow> run_sweep(const AvatarModel<float>& model, const ExpressionVector& expr, const Camera& cam,
                                const std::vector<double>& lods, const RenderSettings& settings = {},
                                std::vector<Image<float>>* renders = nullptr);

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

}  // namespace lodhead
