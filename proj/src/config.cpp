// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#include "lodhead/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "lodhead/errors.hpp"

namespace lodhead {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value,
                                  const std::filesystem::path& base)>;

struct KeySpec {
  std::string help;
  Setter set;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& v) {
  std::filesystem::path p(v);
  return p.is_relative() && !base.empty() ? base / p : p;
}

const std::map<std::string, KeySpec>& key_table() {
  static const std::map<std::string, KeySpec> table = [] {
    std::map<std::string, KeySpec> t;
    auto add = [&](const std::string& k, const std::string& help, Setter s) { t.emplace(k, KeySpec{help, std::move(s)}); };
    auto int_key = [&](const std::string& k, const std::string& help, std::function<int&(RunConfig&)> ref) {
      add(k, help, [ref](RunConfig& c, const std::string& key, const std::string& v, const std::filesystem::path&) {
        ref(c) = to_int(key, v);
      });
    };
    auto dbl_key = [&](const std::string& k, const std::string& help, std::function<double&(RunConfig&)> ref) {
      add(k, help, [ref](RunConfig& c, const std::string& key, const std::string& v, const std::filesystem::path&) {
        ref(c) = to_double(key, v);
      });
    };
    auto path_key = [&](const std::string& k, const std::string& help,
                        std::function<std::filesystem::path&(RunConfig&)> ref) {
      add(k, help, [ref](RunConfig& c, const std::string&, const std::string& v, const std::filesystem::path& base) {
        ref(c) = resolve(base, v);
      });
    };

    path_key("dataset", "dataset directory (read, or written when generate=true)", [](RunConfig& c) -> auto& { return c.dataset; });
    path_key("checkpoint", "output checkpoint path", [](RunConfig& c) -> auto& { return c.checkpoint; });
    path_key("loss_csv", "optional loss-curve CSV path", [](RunConfig& c) -> auto& { return c.loss_csv; });
    add("generate", "synthesise the dataset (true/false)",
        [](RunConfig& c, const std::string& key, const std::string& v, const std::filesystem::path&) {
          c.generate = to_bool(key, v);
        });
    int_key("log_every", "progress print interval in steps (0 = silent)", [](RunConfig& c) -> auto& { return c.log_every; });

    int_key("s_max", "highest UV resolution (l = 0)", [](RunConfig& c) -> auto& { return c.model.s_max; });
    int_key("s_min", "lowest UV resolution (l = 1)", [](RunConfig& c) -> auto& { return c.model.s_min; });
    int_key("field_levels", "number of feature-field levels", [](RunConfig& c) -> auto& { return c.model.field_levels; });
    dbl_key("tau", "blend temperature", [](RunConfig& c) -> auto& { return c.model.tau; });
    dbl_key("offset_fraction", "offset bound relative to the bounding-sphere radius",
            [](RunConfig& c) -> auto& { return c.model.offset_fraction; });
    int_key("feature_dim", "feature channels per level", [](RunConfig& c) -> auto& { return c.model.decoder.feature_dim; });
    int_key("n_freq", "positional-encoding frequencies", [](RunConfig& c) -> auto& { return c.model.decoder.n_freq; });
    int_key("driving_dim", "driving-code size", [](RunConfig& c) -> auto& { return c.model.decoder.driving_dim; });
    int_key("expr_dim", "expression vector size", [](RunConfig& c) -> auto& { return c.model.decoder.expr_dim; });
    int_key("mapper_hidden", "mapping-network hidden width", [](RunConfig& c) -> auto& { return c.model.decoder.mapper_hidden; });
    int_key("hidden_width", "attribute-head hidden width", [](RunConfig& c) -> auto& { return c.model.decoder.hidden_width; });
    int_key("hidden_layers", "attribute-head hidden layers", [](RunConfig& c) -> auto& { return c.model.decoder.hidden_layers; });
    int_key("sh_degree", "spherical-harmonic degree (0..3)", [](RunConfig& c) -> auto& { return c.model.decoder.sh_degree; });
    dbl_key("output_gain", "initial scale of each head's last layer", [](RunConfig& c) -> auto& { return c.model.decoder.output_gain; });
    add("seed", "seed for initialisation, frame order and LOD draws",
        [](RunConfig& c, const std::string& key, const std::string& v, const std::filesystem::path&) {
          c.model.seed = to_u64(key, v);
          c.train.seed = c.model.seed;
        });

    int_key("stage1_steps", "steps at l = 0", [](RunConfig& c) -> auto& { return c.train.stage1_steps; });
    int_key("stage2_steps", "multi-LOD steps", [](RunConfig& c) -> auto& { return c.train.stage2_steps; });
    int_key("lods_per_step", "LOD draws per stage-2 step", [](RunConfig& c) -> auto& { return c.train.lods_per_step; });
    dbl_key("lr_network", "learning rate for mapper and heads", [](RunConfig& c) -> auto& { return c.train.lr_network; });
    dbl_key("lr_field", "learning rate for feature-field values", [](RunConfig& c) -> auto& { return c.train.lr_field; });
    add("lod_reduction", "sum or mean over stage-2 LOD draws",
        [](RunConfig& c, const std::string& key, const std::string& v, const std::filesystem::path&) {
          if (v != "sum" && v != "mean") throw ConfigError(key + ": expected sum or mean, got '" + v + "'");
          c.train.average_lod_gradients = v == "mean";
        });
    dbl_key("lambda_parts", "weight of the masked Huber term", [](RunConfig& c) -> auto& { return c.train.weights.parts; });
    dbl_key("lambda_lpips", "weight of the perceptual hook (zero term by default)",
            [](RunConfig& c) -> auto& { return c.train.weights.lpips; });
    dbl_key("lambda_mu", "weight of the offset regulariser", [](RunConfig& c) -> auto& { return c.train.weights.mu; });
    dbl_key("lambda_s", "weight of the scale regulariser", [](RunConfig& c) -> auto& { return c.train.weights.s; });
    dbl_key("huber_delta", "Huber threshold", [](RunConfig& c) -> auto& { return c.train.weights.huber_delta; });
    add("background", "background colour r,g,b in [0,1]",
        [](RunConfig& c, const std::string& key, const std::string& v, const std::filesystem::path&) {
          std::stringstream ss(v);
          std::string part;
          int i = 0;
          while (std::getline(ss, part, ',')) {
            if (i == 3) throw ConfigError(key + ": expected three comma-separated values");
            c.train.render.background[i++] = to_double(key, trim(part));
          }
          if (i != 3) throw ConfigError(key + ": expected three comma-separated values");
        });
    int_key("tile_size", "rasterizer tile size in pixels", [](RunConfig& c) -> auto& { return c.train.render.tile_size; });

    add("gen_seed", "synthetic dataset seed",
        [](RunConfig& c, const std::string& key, const std::string& v, const std::filesystem::path&) {
          c.synthetic.seed = to_u64(key, v);
        });
    int_key("gen_frames", "synthetic frame count", [](RunConfig& c) -> auto& { return c.synthetic.n_frames; });
    int_key("gen_image_size", "synthetic image side in pixels", [](RunConfig& c) -> auto& { return c.synthetic.image_size; });
    dbl_key("gen_fov", "horizontal field of view (radians)", [](RunConfig& c) -> auto& { return c.synthetic.fov_x; });
    dbl_key("gen_distance", "camera distance", [](RunConfig& c) -> auto& { return c.synthetic.distance; });
    dbl_key("gen_yaw_range", "orbit yaw amplitude (radians)", [](RunConfig& c) -> auto& { return c.synthetic.yaw_range; });
    dbl_key("gen_pitch_range", "orbit pitch amplitude (radians)", [](RunConfig& c) -> auto& { return c.synthetic.pitch_range; });
    dbl_key("gen_scale_factor", "ground-truth scale relative to texel spacing",
            [](RunConfig& c) -> auto& { return c.synthetic.scale_factor; });
    dbl_key("gen_opacity", "ground-truth opacity", [](RunConfig& c) -> auto& { return c.synthetic.opacity; });
    int_key("head_n_lon", "desk-head longitude segments", [](RunConfig& c) -> auto& { return c.synthetic.head.n_lon; });
    int_key("head_n_lat", "desk-head latitude segments", [](RunConfig& c) -> auto& { return c.synthetic.head.n_lat; });
    dbl_key("head_uv_margin", "UV margin around the head chart", [](RunConfig& c) -> auto& { return c.synthetic.head.uv_margin; });
    return t;
  }();
  return table;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text, const std::string& origin) {
  std::map<std::string, std::string> out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (!out.emplace(key, value).second) throw ConfigError(where + ": duplicate key '" + key + "'");
  }
  return out;
}

void RunConfig::validate() const {
  model.validate();
  train.validate();
  if (checkpoint.empty()) throw ConfigError("checkpoint: an output path is required");
  if (!generate && dataset.empty()) throw ConfigError("dataset: required unless generate = true");
  if (generate) {
    synthetic.validate();
    if (synthetic.expr_dim != model.decoder.expr_dim) throw ConfigError("expr_dim differs from the generator's");
  }
  if (train.render.tile_size < 1) throw ConfigError("tile_size must be positive");
  for (double b : train.render.background)
    if (!(b >= 0 && b <= 1)) throw ConfigError("background components must lie in [0, 1]");
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir, const std::string& origin) {
  const auto kv = parse_key_values(text, origin);
  RunConfig cfg;
  const auto& table = key_table();
  for (const auto& [key, value] : kv) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError(origin + ": unknown key '" + key + "'");
    it->second.set(cfg, key, value, base_dir);
  }
  cfg.synthetic.resolution = cfg.model.s_max;
  cfg.synthetic.expr_dim = cfg.model.decoder.expr_dim;
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_run_config(ss.str(), path.parent_path(), path.string());
}

const std::map<std::string, std::string>& run_config_keys() {
  static const std::map<std::string, std::string> keys = [] {
    std::map<std::string, std::string> k;
    for (const auto& [name, spec] : key_table()) k.emplace(name, spec.help);
    return k;
  }();
  return keys;
}

}  // namespace lodhead
