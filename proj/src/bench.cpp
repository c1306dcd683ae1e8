// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#include "lodhead/bench.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "lodhead/errors.hpp"
#include "lodhead/metrics.hpp"
#include "lodhead/pipeline.hpp"
#include "lodhead/simd/kernels.hpp"
#include "lodhead/trainer.hpp"

namespace lodhead {

std::string environment_description() {
  std::string cpu = "unknown cpu";
  std::ifstream info("/proc/cpuinfo");
  std::string line;
  while (std::getline(info, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) cpu = line.substr(colon + 2);
      break;
    }
  }
  std::ostringstream os;
  os << cpu << "; kernels=" << simd::isa_name(simd::active_isa()) << "; threads=1";
#if defined(__VERSION__)
  os << "; compiler=" << __VERSION__;
#endif
  return os.str();
}

BenchReport run_bench(const AvatarModel<float>& model, const std::vector<FrameSample>& frames,
                      const BenchOptions& opts) {
  if (opts.iters < 1) throw ConfigError("bench iters must be at least 1");
  if (opts.warmup < 0) throw ConfigError("bench warmup must be non-negative");
  if (frames.empty()) throw DataError("bench needs at least one frame");
  std::vector<double> lods = opts.lods;
  std::sort(lods.begin(), lods.end());
  for (double l : lods)
    if (!(l >= 0 && l <= 1)) throw ConfigError("bench lod values must lie in [0, 1]");

  BenchReport report;
  report.environment = environment_description();
  std::vector<Image<float>> reference;
  for (const auto& f : frames) reference.push_back(render_frame(model, f.expr, f.camera, 0.0, opts.render));

  for (double lod : lods) {
    BenchRow row;
    row.lod = lod;
    row.resolution = model.field.resolution_for(lod);
    row.gaussian_count = model.gaussian_count_at(lod);
    std::vector<double> samples;
    for (int it = 0; it < opts.warmup + opts.iters; ++it) {
      for (const auto& f : frames) {
        const auto t0 = std::chrono::steady_clock::now();
        const Decoded<float> d = decode_frame(model, f.expr, lod);
        const RenderResult<float> r = render(d.gaussians, f.camera, opts.render);
        const auto t1 = std::chrono::steady_clock::now();
        if (r.image.data.empty()) throw std::logic_error("empty render");
        if (it >= opts.warmup) samples.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
      }
    }
    double sum = 0;
    for (double s : samples) sum += s;
    row.mean_ms = sum / static_cast<double>(samples.size());
    std::nth_element(samples.begin(), samples.begin() + samples.size() / 2, samples.end());
    row.p50_ms = samples[samples.size() / 2];
    row.fps = 1000.0 / row.mean_ms;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const Image<float> img = render_frame(model, frames[i].expr, frames[i].camera, lod, opts.render);
      row.psnr += psnr(reference[i], img);
      row.ssim += ssim(reference[i], img);
      row.l1 += l1(reference[i], img);
    }
    const double n = static_cast<double>(frames.size());
    row.psnr /= n;
    row.ssim /= n;
    row.l1 /= n;
    report.rows.push_back(row);
  }
  return report;
}

std::string BenchReport::to_csv() const {
  std::ostringstream os;
  os << "# " << environment << "\n";
  os << "lod,resolution,gaussian_count,mean_ms,p50_ms,fps,psnr,ssim,l1\n" << std::setprecision(6);
  for (const auto& r : rows)
    os << r.lod << ',' << r.resolution << ',' << r.gaussian_count << ',' << r.mean_ms << ',' << r.p50_ms << ','
       << r.fps << ',' << r.psnr << ',' << r.ssim << ',' << r.l1 << '\n';
  return os.str();
}

void BenchReport::write_csv(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write " + path.string());
  os << to_csv();
}

std::vector<double> default_sweep_lods() {
  std::vector<double> l;
  for (int i = 0; i <= 20; ++i) l.push_back(i / 20.0);
  return l;
}

std::vector<SweepRow> run_sweep(const AvatarModel<float>& model, const ExpressionVector& expr, const Camera& cam,
                                const std::vector<double>& lods, const RenderSettings& settings,
                                std::vector<Image<float>>* renders) {
  for (double l : lods)
    if (!(l >= 0 && l <= 1)) throw ConfigError("sweep lod values must lie in [0, 1]");
  const Image<float> ref = render_frame(model, expr, cam, 0.0, settings);
  std::vector<SweepRow> rows;
  for (double lod : lods) {
    const Image<float> img = render_frame(model, expr, cam, lod, settings);
    SweepRow r;
    r.lod = lod;
    r.resolution = model.field.resolution_for(lod);
    r.gaussian_count = model.gaussian_count_at(lod);
    r.psnr = psnr(ref, img);
    r.ssim = ssim(ref, img);
    r.l1 = l1(ref, img);
    rows.push_back(r);
    if (renders) renders->push_back(img);
  }
  return rows;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write " + path.string());
  os << "lod,resolution,gaussian_count,psnr,ssim,l1\n" << std::setprecision(6);
  for (const auto& r : rows)
    os << r.lod << ',' << r.resolution << ',' << r.gaussian_count << ',' << r.psnr << ',' << r.ssim << ',' << r.l1
       << '\n';
}

}  // namespace lodhead
