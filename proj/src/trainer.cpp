// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#include "lodhead/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <string>

#include "lodhead/errors.hpp"
#include "lodhead/metrics.hpp"

namespace lodhead {

void TrainConfig::validate() const {
  if (stage1_steps < 0 || stage2_steps < 0) throw ConfigError("stage step counts must be non-negative");
  if (lods_per_step < 1) throw ConfigError("lods_per_step must be at least 1");
  if (!(lr_network > 0) || !(lr_field > 0)) throw ConfigError("learning rates must be positive");
  try {
    weights.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

template <class T>
Trainer<T>::Trainer(AvatarModel<T>& model, TrainConfig cfg)
    : model_(model),
      cfg_(std::move(cfg)),
      rng_(cfg_.seed),
      field_opt_(AdamConfig{cfg_.lr_field}),
      mapper_opt_(AdamConfig{cfg_.lr_network}),
      heads_opt_(AdamConfig{cfg_.lr_network}) {
  cfg_.validate();
}

template <class T>
StepEvaluation<T> Trainer<T>::evaluate(const FrameSample& frame, const std::vector<double>& lods,
                                       bool with_mapper) const {
  StepEvaluation<T> out{{}, ModelGradients<T>::zeros_like(model_)};
  const Image<T> target = frame.image.template cast<T>();
  const T lod_scale = cfg_.average_lod_gradients ? T(1) / static_cast<T>(lods.size()) : T(1);
  for (double lod : lods) {
    const FrameForward<T> fwd = forward_frame(model_, frame.expr, frame.camera, lod, cfg_.render);
    LossGradients<T> lg;
    const LossTerms<T> t = total_loss(target, fwd.render.image, frame.part_mask, fwd.decoded.offsets,
                                      fwd.decoded.gaussians.scales, lod, cfg_.weights, &lg);
    if (lod_scale != T(1)) {
      for (T& v : lg.rendered.data) v *= lod_scale;
      for (T& v : lg.offsets) v *= lod_scale;
      for (T& v : lg.scales) v *= lod_scale;
    }
    backward_frame(model_, fwd, frame.camera, cfg_.render, lg.rendered, lg.offsets, lg.scales, out.grads, with_mapper);
    out.terms.full += t.full;
    out.terms.parts += t.parts;
    out.terms.rgb += t.rgb;
    out.terms.mu += t.mu;
    out.terms.s += t.s;
    out.terms.total += t.total;
  }
  return out;
}

template <class T>
std::vector<double> Trainer<T>::draw_lods() {
  const int n = cfg_.lods_per_step;
  if (n == 1) return {rng_.uniform()};
  std::vector<double> lods{0.0, 1.0};
  for (int i = 2; i < n; ++i) lods.push_back(rng_.uniform());
  return lods;
}

template <class T>
std::size_t Trainer<T>::next_frame(std::size_t n) {
  if (order_.size() != n || cursor_ >= n) {
    order_.resize(n);
    for (std::size_t i = 0; i < n; ++i) order_[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(order_[i - 1], order_[rng_.below(i)]);
    cursor_ = 0;
  }
  return order_[cursor_++];
}

template <class T>
void Trainer<T>::apply(const ModelGradients<T>& grads, bool with_mapper) {
  field_opt_.step(field_parameter_blocks(model_), grads.field_blocks());
  if (with_mapper) mapper_opt_.step(model_.mapper.parameter_blocks(), Mlp<T>::gradient_blocks(grads.mapper));
  std::vector<std::span<T>> hp;
  std::vector<std::span<const T>> hg;
  for (int h = 0; h < kHeadCount; ++h) {
    auto p = model_.heads[h].parameter_blocks();
    auto g = Mlp<T>::gradient_blocks(grads.heads[h]);
    hp.insert(hp.end(), p.begin(), p.end());
    hg.insert(hg.end(), g.begin(), g.end());
  }
  heads_opt_.step(hp, hg);
}

template <class T>
void Trainer<T>::check_finite(const LossRecord& rec, const ModelGradients<T>& grads, bool with_mapper) const {
  const std::string where = " at stage " + std::to_string(rec.stage) + " step " + std::to_string(rec.step);
  if (!std::isfinite(rec.total)) throw DivergenceError("loss became non-finite" + where);
  T sum = T(0);
  for (const auto& b : grads.field_blocks())
    for (T v : b) sum += v * T(0);
  for (const auto& b : grads.network_blocks(with_mapper))
    for (T v : b) sum += v * T(0);
  if (!std::isfinite(sum)) throw DivergenceError("gradient became non-finite" + where);
}

template <class T>
void Trainer<T>::run_stage1(const std::vector<FrameSample>& data, int steps) {
  if (steps > 0 && data.empty()) throw DataError("training needs at least one frame");
  for (int step = 0; step < steps; ++step) {
    const std::size_t f = next_frame(data.size());
    const auto eval = evaluate(data[f], {0.0}, true);
    LossRecord rec{1, step, f, eval.terms.total, eval.terms.rgb, eval.terms.parts, eval.terms.mu, eval.terms.s, {0.0}};
    check_finite(rec, eval.grads, true);
    apply(eval.grads, true);
    history_.push_back(rec);
    if (on_step) on_step(rec);
  }
}

template <class T>
void Trainer<T>::run_stage2(const std::vector<FrameSample>& data, int steps) {
  if (steps > 0 && data.empty()) throw DataError("training needs at least one frame");
  for (int step = 0; step < steps; ++step) {
    const std::size_t f = next_frame(data.size());
    const std::vector<double> lods = draw_lods();
    const auto eval = evaluate(data[f], lods, false);
    LossRecord rec{2, step, f, eval.terms.total, eval.terms.rgb, eval.terms.parts, eval.terms.mu, eval.terms.s, lods};
    check_finite(rec, eval.grads, false);
    apply(eval.grads, false);
    history_.push_back(rec);
    if (on_step) on_step(rec);
  }
}

template <class T>
void Trainer<T>::write_loss_csv(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write " + path.string());
  os << "stage,step,frame,total,rgb,parts,mu,s,lods\n" << std::setprecision(9);
  for (const auto& r : history_) {
    os << r.stage << ',' << r.step << ',' << r.frame << ',' << r.total << ',' << r.rgb << ',' << r.parts << ','
       << r.mu << ',' << r.s << ',';
    for (std::size_t i = 0; i < r.lods.size(); ++i) os << (i ? ";" : "") << r.lods[i];
    os << '\n';
  }
}

template <class T>
Image<float> render_frame(const AvatarModel<T>& model, const ExpressionVector& expr, const Camera& cam, double lod,
                          const RenderSettings& settings) {
  const Decoded<T> d = decode_frame(model, expr, lod);
  return render(d.gaussians, cam, settings).image.clamped().template cast<float>();
}

template <class T>
FrameMetrics evaluate_dataset(const AvatarModel<T>& model, const std::vector<FrameSample>& data, double lod,
                              const RenderSettings& settings) {
  FrameMetrics m;
  if (data.empty()) return m;
  for (const auto& f : data) {
    const Image<float> img = render_frame(model, f.expr, f.camera, lod, settings);
    m.psnr += psnr(f.image, img);
    m.ssim += ssim(f.image, img);
    m.l1 += l1(f.image, img);
  }
  const double n = static_cast<double>(data.size());
  m.psnr /= n;
  m.ssim /= n;
  m.l1 /= n;
  return m;
}

template class Trainer<float>;
template class Trainer<double>;
template Image<float> render_frame<float>(const AvatarModel<float>&, const ExpressionVector&, const Camera&, double,
                                          const RenderSettings&);
template Image<float> render_frame<double>(const AvatarModel<double>&, const ExpressionVector&, const Camera&,
                                           double, const RenderSettings&);
template FrameMetrics evaluate_dataset<float>(const AvatarModel<float>&, const std::vector<FrameSample>&, double,
                                              const RenderSettings&);
template FrameMetrics evaluate_dataset<double>(const AvatarModel<double>&, const std::vector<FrameSample>&, double,
                                               const RenderSettings&);

}  // namespace lodhead
