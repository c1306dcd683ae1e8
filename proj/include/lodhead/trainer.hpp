// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "lodhead/dataset.hpp"
#include "lodhead/losses.hpp"
#include "lodhead/model.hpp"
#include "lodhead/nn.hpp"
#include "lodhead/pipeline.hpp"

namespace lodhead {

struct TrainConfig {
  int stage1_steps = 2000;
  int stage2_steps = 3000;
  int lods_per_step = 5;
  double lr_network = 1e-3;
  double lr_field = 5e-3;
  bool average_lod_gradients = false;  // default sums over LOD draws
  std::uint64_t seed = 1;
  LossWeights weights;
  RenderSettings render;

  void validate() const;  // throws ConfigError
};

struct LossRecord {
  int stage = 0;
  int step = 0;
  std::size_t frame = 0;
  double total = 0, rgb = 0, parts = 0, mu = 0, s = 0;
  std::vector<double> lods;
};

/// Per-frame losses and gradients for one set of LOD draws.
template <class T>
struct StepEvaluation {
  LossTerms<double> terms;  // summed over draws
  ModelGradients<T> grads;
};

/// Two-stage optimisation of an AvatarModel. Stage 1 trains every block at
/// l = 0; stage 2 draws several LODs per step (always 0 and 1), accumulates
/// their gradients and leaves the mapping network untouched.
template <class T>
class Trainer {
 public:
  Trainer(AvatarModel<T>& model, TrainConfig cfg);

  /// Loss and gradient of one frame summed over `lods`.
  StepEvaluation<T> evaluate(const FrameSample& frame, const std::vector<double>& lods, bool with_mapper) const;

  /// LOD values for the next stage-2 step (consumes the trainer's RNG).
  std::vector<double> draw_lods();

  void run_stage1(const std::vector<FrameSample>& data, int steps);
  void run_stage2(const std::vector<FrameSample>& data, int steps);
  void run(const std::vector<FrameSample>& data) {
    run_stage1(data, cfg_.stage1_steps);
    run_stage2(data, cfg_.stage2_steps);
  }

  /// Single optimiser update from precomputed gradients.
  void apply(const ModelGradients<T>& grads, bool with_mapper);

  const std::vector<LossRecord>& history() const { return history_; }
  void write_loss_csv(const std::filesystem::path& path) const;
  std::function<void(const LossRecord&)> on_step;

 private:
  std::size_t next_frame(std::size_t n);
  void check_finite(const LossRecord& rec, const ModelGradients<T>& grads, bool with_mapper) const;

  AvatarModel<T>& model_;
  TrainConfig cfg_;
  Rng rng_;
  Adam<T> field_opt_;
  Adam<T> mapper_opt_;
  Adam<T> heads_opt_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  std::vector<LossRecord> history_;
};

/// Clamped render of one frame at one LOD.
template <class T>
Image<float> render_frame(const AvatarModel<T>& model, const ExpressionVector& expr, const Camera& cam, double lod,
                          const RenderSettings& settings = {});

struct FrameMetrics {
  double psnr = 0, ssim = 0, l1 = 0;
};

/// Mean metrics of clamped renders against the stored targets.
template <class T>
FrameMetrics evaluate_dataset(const AvatarModel<T>& model, const std::vector<FrameSample>& data, double lod,
                              const RenderSettings& settings = {});

extern template class Trainer<float>;
extern template class Trainer<double>;

}  // namespace lodhead
