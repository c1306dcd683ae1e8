// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "lodhead/bench.hpp"
#include "lodhead/checkpoint.hpp"
#include "lodhead/config.hpp"
#include "lodhead/dataset.hpp"
#include "lodhead/errors.hpp"
#include "lodhead/export.hpp"
#include "lodhead/image_io.hpp"
#include "lodhead/metrics.hpp"
#include "lodhead/pipeline.hpp"
#include "lodhead/trainer.hpp"

using namespace lodhead;
namespace fs = std::filesystem;

namespace {

struct CommandResult {
  int code = -1;
  std::string output;
};

CommandResult run(const std::string& args) {
  const std::string cmd = std::string(LODHEAD_CLI_PATH) + " " + args + " 2>&1";
  CommandResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  while (std::fgets(buf.data(), buf.size(), pipe)) r.output += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  os << text;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
  return out;
}

ModelConfig small_model() {
  ModelConfig m;
  m.s_max = 16;
  m.s_min = 8;
  m.decoder.expr_dim = 12;
  m.decoder.hidden_width = 16;
  m.decoder.hidden_layers = 2;
  m.decoder.feature_dim = 8;
  m.decoder.n_freq = 3;
  m.decoder.mapper_hidden = 8;
  return m;
}

AvatarModel<float> trained_small_model() {
  SyntheticOptions o;
  o.n_frames = 2;
  o.image_size = 24;
  o.resolution = 16;
  o.expr_dim = 12;
  const auto data = generate_synthetic_dataset(o);
  auto model = AvatarModel<float>::create(small_model(), data.mesh);
  Trainer<float> tr(model, TrainConfig{});
  tr.run_stage1(data.frames, 3);
  tr.run_stage2(data.frames, 2);
  return model;
}

// Temporary directory removed at scope exit.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const char* kTrainConfig = R"(# tiny end-to-end run
generate = true
dataset = data
checkpoint = model.ckpt
loss_csv = loss.csv
log_every = 5
s_max = 16
s_min = 8
feature_dim = 8
n_freq = 3
expr_dim = 12
mapper_hidden = 8
hidden_width = 16
hidden_layers = 2
stage1_steps = 10
stage2_steps = 10
gen_frames = 2
gen_image_size = 32
)";

}  // namespace

TEST_CASE("checkpoint round trip is bit exact") {
  const auto model = trained_small_model();
  TempDir dir("lodhead_ckpt_roundtrip");
  save_checkpoint(model, dir.path / "a.ckpt");
  const auto back = load_checkpoint(dir.path / "a.ckpt");
  save_checkpoint(back, dir.path / "b.ckpt");
  CHECK(read_file(dir.path / "a.ckpt") == read_file(dir.path / "b.ckpt"));

  for (std::size_t l = 0; l < model.field.levels().size(); ++l) CHECK(back.field.levels()[l].data == model.field.levels()[l].data);
  for (int h = 0; h < kHeadCount; ++h)
    for (std::size_t l = 0; l < model.heads[h].layers().size(); ++l) {
      CHECK(back.heads[h].layers()[l].weight == model.heads[h].layers()[l].weight);
      CHECK(back.heads[h].layers()[l].bias == model.heads[h].layers()[l].bias);
      CHECK(back.heads[h].layers()[l].activation == model.heads[h].layers()[l].activation);
    }
  CHECK(mapper_hash(back) == mapper_hash(model));
  CHECK(back.config.s_max == model.config.s_max);
  CHECK(back.config.tau == model.config.tau);
  CHECK(back.config.offset_fraction == model.config.offset_fraction);
  CHECK(back.config.decoder.sh_degree == model.config.decoder.sh_degree);
  CHECK(back.mesh.vertices == model.mesh.vertices);
  CHECK(back.mesh.blendshapes.size() == model.mesh.blendshapes.size());
  CHECK_NOTHROW(back.check_consistency());

  ExpressionVector e(12, 0.0);
  e[2] = 0.4;
  const auto cam = synthetic_base_camera(model.mesh, SyntheticOptions{});
  CHECK(render_frame(model, e, cam, 0.3).data == render_frame(back, e, cam, 0.3).data);
}

TEST_CASE("checkpoint fault injection produces typed errors") {
  const auto bytes = serialize_checkpoint(trained_small_model());
  auto kind_of = [](const std::vector<std::uint8_t>& b) {
    try {
      deserialize_checkpoint(b);
    } catch (const CheckpointError& e) {
      return static_cast<int>(e.kind());
    }
    return -1;
  };
  using K = CheckpointError::Kind;
  CHECK(kind_of(bytes) == -1);

  for (std::size_t cut : {std::size_t(0), std::size_t(3), std::size_t(7), std::size_t(15), bytes.size() / 2,
                          bytes.size() - 9, bytes.size() - 1}) {
    CAPTURE(cut);
    CHECK(kind_of(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + static_cast<long>(cut))) ==
          static_cast<int>(K::truncated));
  }
  auto magic = bytes;
  magic[0] ^= 0x20;
  CHECK(kind_of(magic) == static_cast<int>(K::bad_magic));
  auto version = bytes;
  version[4] = 2;
  CHECK(kind_of(version) == static_cast<int>(K::bad_version));
  auto body = bytes;
  body[bytes.size() / 2] ^= 0x01;
  CHECK(kind_of(body) == static_cast<int>(K::corrupt));
  auto extra = bytes;
  extra.push_back(0);
  CHECK(kind_of(extra) == static_cast<int>(K::corrupt));

  // Any single-byte flip must surface as a CheckpointError.
  Rng rng(4);
  for (int t = 0; t < 300; ++t) {
    auto b = bytes;
    b[rng.below(b.size())] ^= static_cast<std::uint8_t>(1 + rng.below(255));
    CHECK(kind_of(b) >= 0);
  }
  CHECK(std::string(checkpoint_error_name(K::truncated)) != std::string(checkpoint_error_name(K::corrupt)));

  TempDir dir("lodhead_ckpt_faults");
  try {
    load_checkpoint(dir.path / "missing.ckpt");
    FAIL("expected an error");
  } catch (const CheckpointError& e) {
    CHECK(e.kind() == K::io);
  }
}

TEST_CASE("config parsing is strict") {
  CHECK_THROWS_AS(parse_key_values("a = 1\na = 2\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_key_values("just words\n", "t"), ConfigError);
  const auto kv = parse_key_values("# comment\n\n  x = 3 \ny=hello world\n", "t");
  CHECK(kv.at("x") == "3");
  CHECK(kv.at("y") == "hello world");

  try {
    parse_run_config("checkpoint = m.ckpt\ndataset = d\ns_max = 32\ns_min = 64\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("s_min") != std::string::npos);
    CHECK(msg.find("s_max") != std::string::npos);
  }
  try {
    parse_run_config("checkpoint = m.ckpt\ndataset = d\ns_max = 32\nlearning_rte = 0.1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("learning_rte") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_run_config("checkpoint = m.ckpt\ndataset = d\n" "s_max = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("checkpoint = m.ckpt\ndataset = d\n" "lod_reduction = median\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("checkpoint = m.ckpt\ndataset = d\n" "generate = maybe\n"), ConfigError);

  const auto cfg = parse_run_config(kTrainConfig, "/tmp/base");
  CHECK(cfg.generate);
  CHECK(cfg.dataset == fs::path("/tmp/base/data"));
  CHECK(cfg.checkpoint == fs::path("/tmp/base/model.ckpt"));
  CHECK(cfg.model.s_max == 16);
  CHECK(cfg.synthetic.resolution == 16);
  CHECK(cfg.synthetic.expr_dim == 12);
  CHECK(cfg.train.stage2_steps == 10);
  const auto mean = parse_run_config("checkpoint = m.ckpt\ndataset = d\n" "lod_reduction = mean\n");
  CHECK(mean.train.average_lod_gradients);
  CHECK(run_config_keys().count("lambda_parts") == 1);
  CHECK_THROWS_AS(parse_run_config("s_max = 32\n"), ConfigError);
}

TEST_CASE("dataset directory round trip") {
  SyntheticOptions o;
  o.n_frames = 3;
  o.image_size = 20;
  o.resolution = 16;
  o.expr_dim = 12;
  const auto data = generate_synthetic_dataset(o);
  TempDir dir("lodhead_dataset_roundtrip");
  save_dataset(data, dir.path / "d");
  const auto back = load_dataset(dir.path / "d");
  REQUIRE(back.frames.size() == 3);
  for (std::size_t f = 0; f < 3; ++f) {
    const auto& a = data.frames[f];
    const auto& b = back.frames[f];
    for (std::size_t i = 0; i < a.image.data.size(); ++i)
      CHECK(b.image.data[i] == doctest::Approx(std::round(a.image.data[i] * 255.0) / 255.0).epsilon(1e-6));
    CHECK(a.part_mask.data == b.part_mask.data);
    for (std::size_t k = 0; k < a.expr.size(); ++k) CHECK(b.expr[k] == static_cast<double>(static_cast<float>(a.expr[k])));
    CHECK(a.camera.rotation == b.camera.rotation);
    CHECK(a.camera.translation == b.camera.translation);
    CHECK(a.camera.fx == b.camera.fx);
  }
  CHECK(back.mesh.faces.size() == data.mesh.faces.size());
  CHECK_THROWS_AS(load_dataset(dir.path / "nowhere"), DataError);
  write_file(dir.path / "d" / "manifest.txt", "format = something-else\n");
  CHECK_THROWS(load_dataset(dir.path / "d"));
}

TEST_CASE("gaussian PLY export round trip") {
  const auto model = trained_small_model();
  ExpressionVector e(12, 0.1);
  const auto d = decode_frame(model, e, 0.5);
  TempDir dir("lodhead_ply");
  write_gaussians_ply(dir.path / "g.ply", d.gaussians);
  const auto back = read_gaussians_ply(dir.path / "g.ply");
  CHECK(back.size() == model.gaussian_count_at(0.5));
  CHECK(back.sh_degree == d.gaussians.sh_degree);
  CHECK(back.means == d.gaussians.means);
  CHECK(back.scales == d.gaussians.scales);
  CHECK(back.rotations == d.gaussians.rotations);
  CHECK(back.opacities == d.gaussians.opacities);
  CHECK(back.sh == d.gaussians.sh);
  const std::string head = read_file(dir.path / "g.ply").substr(0, 200);
  CHECK(head.rfind("ply\nformat binary_little_endian 1.0\n", 0) == 0);
}

TEST_CASE("bench and sweep reports") {
  const auto model = trained_small_model();
  SyntheticOptions o;
  o.image_size = 24;
  o.expr_dim = 12;
  o.n_frames = 1;
  o.resolution = 16;
  const auto data = generate_synthetic_dataset(o);
  BenchOptions opts;
  opts.warmup = 1;
  opts.iters = 2;
  const auto report = run_bench(model, data.frames, opts);
  REQUIRE(report.rows.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(report.rows[i].gaussian_count == model.gaussian_count_at(report.rows[i].lod));
    CHECK(report.rows[i].fps == doctest::Approx(1000.0 / report.rows[i].mean_ms));
    if (i > 0) CHECK(report.rows[i].gaussian_count < report.rows[i - 1].gaussian_count);
  }
  CHECK(report.rows[0].psnr == kPsnrCap);
  const auto csv = lines_of(report.to_csv());
  REQUIRE(csv.size() == 7);
  CHECK(csv[0].rfind("# ", 0) == 0);
  CHECK(csv[1] == "lod,resolution,gaussian_count,mean_ms,p50_ms,fps,psnr,ssim,l1");

  const auto lods = default_sweep_lods();
  REQUIRE(lods.size() == 21);
  CHECK(lods[1] == 0.05);
  std::vector<Image<float>> renders;
  const auto rows = run_sweep(model, data.frames[0].expr, data.frames[0].camera, lods, {}, &renders);
  CHECK(rows.size() == 21);
  CHECK(renders.size() == 21);
  CHECK(rows[0].psnr == kPsnrCap);
  for (const auto& r : rows) CHECK(std::isfinite(r.psnr));
}

TEST_CASE("command line: train, render, sweep, bench, export, generate") {
  TempDir dir("lodhead_cli_test");
  write_file(dir.path / "run.cfg", kTrainConfig);
  const auto train = run("train " + (dir.path / "run.cfg").string());
  INFO(train.output);
  REQUIRE(train.code == 0);
  CHECK(fs::exists(dir.path / "model.ckpt"));
  CHECK(fs::exists(dir.path / "data" / "manifest.txt"));
  CHECK(lines_of(read_file(dir.path / "loss.csv")).size() == 21);
  const std::string first = read_file(dir.path / "model.ckpt");

  fs::rename(dir.path / "model.ckpt", dir.path / "first.ckpt");
  REQUIRE(run("train " + (dir.path / "run.cfg").string()).code == 0);
  CHECK(read_file(dir.path / "model.ckpt") == first);

  const std::string ckpt = (dir.path / "model.ckpt").string();
  const std::string ds = (dir.path / "data").string();

  SUBCASE("render: default camera, zero orbit, LOD counts") {
    const auto a = run("render --checkpoint " + ckpt + " --dataset " + ds + " --lod 0 --out " + (dir.path / "a.png").string());
    const auto b = run("render --checkpoint " + ckpt + " --dataset " + ds + " --lod 0 --yaw 0 --pitch 0 --out " +
                       (dir.path / "b.png").string());
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(read_file(dir.path / "a.png") == read_file(dir.path / "b.png"));
    const auto c = run("render --checkpoint " + ckpt + " --dataset " + ds + " --lod 0 --yaw 0.4 --out " +
                       (dir.path / "c.png").string());
    REQUIRE(c.code == 0);
    CHECK(read_file(dir.path / "a.png") != read_file(dir.path / "c.png"));
    const auto img = read_png(dir.path / "a.png");
    CHECK(img.width == 32);

    const auto one = run("render --checkpoint " + ckpt + " --lod 1 --out " + (dir.path / "d.png").string());
    REQUIRE(one.code == 0);
    auto count = [](const std::string& out) {
      const auto pos = out.find("gaussians ");
      return std::stod(out.substr(pos + 10));
    };
    const double ratio = count(one.output) / count(a.output);
    const double expected = (8.0 / 16.0) * (8.0 / 16.0);
    CHECK(std::abs(ratio - expected) / expected <= 0.3);

    CHECK(run("render --checkpoint " + ckpt + " --lod 1.5 --out " + (dir.path / "e.png").string()).code == 2);
    CHECK(run("render --checkpoint " + (dir.path / "missing.ckpt").string() + " --out x.png").code == 3);
  }

  SUBCASE("render: cross-driving and expression dimension checks") {
    const std::string other = (dir.path / "other").string();
    REQUIRE(run("generate-data --out " + other + " --seed 99 --frames 2 --image-size 32 --resolution 16 --expr-dim 12").code == 0);
    CHECK(run("render --checkpoint " + ckpt + " --dataset " + other + " --frame 1 --out " + (dir.path / "x.png").string()).code == 0);
    const std::string wrong = (dir.path / "wrong").string();
    REQUIRE(run("generate-data --out " + wrong + " --frames 1 --image-size 32 --resolution 16 --expr-dim 20").code == 0);
    const auto r = run("render --checkpoint " + ckpt + " --dataset " + wrong + " --out " + (dir.path / "y.png").string());
    CHECK(r.code == 3);
    CHECK(r.output.find("expression dimension") != std::string::npos);
    CHECK(run("render --checkpoint " + ckpt + " --dataset " + other + " --frame 7 --out " + (dir.path / "z.png").string()).code == 3);
  }

  SUBCASE("sweep") {
    const auto s = run("sweep --checkpoint " + ckpt + " --dataset " + ds + " --out-dir " + (dir.path / "sweep").string());
    REQUIRE(s.code == 0);
    int pngs = 0;
    for (const auto& e : fs::directory_iterator(dir.path / "sweep"))
      if (e.path().filename().string().rfind("lod_", 0) == 0) ++pngs;
    CHECK(pngs == 21);
    CHECK(fs::exists(dir.path / "sweep" / "strip.png"));
    CHECK(lines_of(read_file(dir.path / "sweep" / "sweep.csv")).size() == 22);

    const auto z = run("sweep --checkpoint " + ckpt + " --lods 0 --no-strip --out-dir " + (dir.path / "sweep0").string());
    REQUIRE(z.code == 0);
    const auto rows = lines_of(read_file(dir.path / "sweep0" / "sweep.csv"));
    REQUIRE(rows.size() == 2);
    CHECK(std::stod(split(rows[1], ',')[3]) == kPsnrCap);
    CHECK_FALSE(fs::exists(dir.path / "sweep0" / "strip.png"));
    CHECK(run("sweep --checkpoint " + ckpt + " --lods 0,abc --out-dir " + (dir.path / "bad").string()).code == 2);
  }

  SUBCASE("bench") {
    const auto b = run("bench --checkpoint " + ckpt + " --dataset " + ds + " --frames 2 --warmup 1 --iters 2 --out " +
                       (dir.path / "bench.csv").string());
    REQUIRE(b.code == 0);
    const auto rows = lines_of(read_file(dir.path / "bench.csv"));
    REQUIRE(rows.size() == 7);
    std::size_t prev = SIZE_MAX;
    for (std::size_t i = 2; i < 7; ++i) {
      const std::size_t count = std::stoul(split(rows[i], ',')[2]);
      CHECK(count < prev);
      prev = count;
    }
  }

  SUBCASE("export-gaussians") {
    const auto e = run("export-gaussians --checkpoint " + ckpt + " --dataset " + ds + " --lod 1 --out " +
                       (dir.path / "g.ply").string());
    REQUIRE(e.code == 0);
    const auto model = load_checkpoint(ckpt);
    CHECK(read_gaussians_ply(dir.path / "g.ply").size() == model.gaussian_count_at(1.0));
  }

  SUBCASE("configuration and usage errors") {
    write_file(dir.path / "bad.cfg", "s_max = 8\ns_min = 16\n");
    const auto bad = run("train " + (dir.path / "bad.cfg").string());
    CHECK(bad.code == 2);
    CHECK(bad.output.find("s_min") != std::string::npos);
    write_file(dir.path / "typo.cfg", "stage1_stepz = 3\n");
    CHECK(run("train " + (dir.path / "typo.cfg").string()).code == 2);
    CHECK(run("train " + (dir.path / "absent.cfg").string()).code == 2);
    CHECK(run("frobnicate").code == 2);
  }
}
