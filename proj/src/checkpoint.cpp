// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#include "lodhead/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "lodhead/errors.hpp"

namespace lodhead {

static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes a little-endian host");

namespace {

using Kind = CheckpointError::Kind;

std::uint64_t fnv1a(const std::uint8_t* p, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  template <class V>
  void put(V v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    bytes.insert(bytes.end(), p, p + sizeof(V));
  }
  void put_floats(const std::vector<float>& v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(v.data());
    bytes.insert(bytes.end(), p, p + v.size() * sizeof(float));
  }
  std::vector<std::uint8_t> bytes;
};

class Reader {
 public:
  Reader(const std::uint8_t* p, std::size_t n) : p_(p), n_(n) {}
  template <class V>
  V get() {
    need(sizeof(V));
    V v;
    std::memcpy(&v, p_ + pos_, sizeof(V));
    pos_ += sizeof(V);
    return v;
  }
  void get_floats(std::vector<float>& v, std::size_t count) {
    need(count * sizeof(float));
    v.resize(count);
    std::memcpy(v.data(), p_ + pos_, count * sizeof(float));
    pos_ += count * sizeof(float);
  }
  std::uint32_t get_count(std::uint32_t limit, const char* what) {
    const auto n = get<std::uint32_t>();
    if (n > limit) throw CheckpointError(Kind::corrupt, std::string("corrupt checkpoint: implausible ") + what);
    return n;
  }
  bool done() const { return pos_ == n_; }

 private:
  void need(std::size_t k) {
    if (k > n_ - pos_) throw CheckpointError(Kind::corrupt, "corrupt checkpoint: body ends inside a record");
  }
  const std::uint8_t* p_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

void write_config(Writer& w, const ModelConfig& c) {
  w.put<std::int32_t>(c.s_max);
  w.put<std::int32_t>(c.s_min);
  w.put<std::int32_t>(c.field_levels);
  w.put<double>(c.tau);
  w.put<double>(c.offset_fraction);
  const DecoderConfig& d = c.decoder;
  for (int v : {d.feature_dim, d.n_freq, d.driving_dim, d.expr_dim, d.mapper_hidden, d.hidden_width, d.hidden_layers,
                d.sh_degree})
    w.put<std::int32_t>(v);
  w.put<double>(d.output_gain);
  w.put<std::uint64_t>(c.seed);
}

ModelConfig read_config(Reader& r) {
  ModelConfig c;
  c.s_max = r.get<std::int32_t>();
  c.s_min = r.get<std::int32_t>();
  c.field_levels = r.get<std::int32_t>();
  c.tau = r.get<double>();
  c.offset_fraction = r.get<double>();
  DecoderConfig& d = c.decoder;
  for (int* v : {&d.feature_dim, &d.n_freq, &d.driving_dim, &d.expr_dim, &d.mapper_hidden, &d.hidden_width,
                 &d.hidden_layers, &d.sh_degree})
    *v = r.get<std::int32_t>();
  d.output_gain = r.get<double>();
  c.seed = r.get<std::uint64_t>();
  return c;
}

void write_mlp(Writer& w, const Mlp<float>& net) {
  w.put<std::uint32_t>(static_cast<std::uint32_t>(net.layers().size()));
  for (const auto& l : net.layers()) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(l.in));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(l.out));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(l.activation));
    w.put_floats(l.weight);
    w.put_floats(l.bias);
  }
}

Mlp<float> read_mlp(Reader& r) {
  const auto n = r.get_count(1024, "layer count");
  std::vector<DenseLayer<float>> layers(n);
  for (auto& l : layers) {
    l.in = static_cast<int>(r.get_count(1u << 16, "layer width"));
    l.out = static_cast<int>(r.get_count(1u << 16, "layer width"));
    const auto act = r.get<std::uint8_t>();
    if (act > static_cast<std::uint8_t>(Activation::exponential))
      throw CheckpointError(Kind::corrupt, "corrupt checkpoint: unknown activation tag");
    l.activation = static_cast<Activation>(act);
    r.get_floats(l.weight, static_cast<std::size_t>(l.in) * l.out);
    r.get_floats(l.bias, static_cast<std::size_t>(l.out));
  }
  try {
    return Mlp<float>(std::move(layers));
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(Kind::corrupt, std::string("corrupt checkpoint: ") + e.what());
  }
}

}  // namespace

const char* checkpoint_error_name(CheckpointError::Kind kind) {
  switch (kind) {
    case Kind::io:
      return "io";
    case Kind::truncated:
      return "truncated";
    case Kind::bad_magic:
      return "bad_magic";
    case Kind::bad_version:
      return "bad_version";
    case Kind::corrupt:
      return "corrupt";
  }
  return "unknown";
}

std::vector<std::uint8_t> serialize_checkpoint(const AvatarModel<float>& model) {
  model.check_consistency();
  Writer body;
  write_config(body, model.config);
  const auto& levels = model.field.levels();
  body.put<std::uint32_t>(static_cast<std::uint32_t>(levels.size()));
  for (const auto& l : levels) {
    body.put<std::uint32_t>(static_cast<std::uint32_t>(l.resolution));
    body.put<std::uint32_t>(static_cast<std::uint32_t>(l.channels));
    body.put_floats(l.data);
  }
  write_mlp(body, model.mapper);
  for (const auto& h : model.heads) write_mlp(body, h);

  const Mesh& m = model.mesh;
  body.put<std::uint32_t>(static_cast<std::uint32_t>(m.vertices.size()));
  for (const Vec3& v : m.vertices)
    for (int a = 0; a < 3; ++a) body.put<double>(v[a]);
  body.put<std::uint32_t>(static_cast<std::uint32_t>(m.faces.size()));
  for (const auto& f : m.faces)
    for (auto i : f) body.put<std::uint32_t>(i);
  for (const Vec2& uv : m.uvs) {
    body.put<double>(uv.x());
    body.put<double>(uv.y());
  }
  body.put<std::uint32_t>(static_cast<std::uint32_t>(m.blendshapes.size()));
  for (const auto& b : m.blendshapes)
    for (const Vec3& v : b)
      for (int a = 0; a < 3; ++a) body.put<double>(v[a]);

  Writer out;
  for (char c : kCheckpointMagic) out.put<char>(c);
  out.put<std::uint32_t>(kCheckpointVersion);
  out.put<std::uint64_t>(body.bytes.size());
  out.bytes.insert(out.bytes.end(), body.bytes.begin(), body.bytes.end());
  out.put<std::uint64_t>(fnv1a(body.bytes.data(), body.bytes.size()));
  return out.bytes;
}

AvatarModel<float> deserialize_checkpoint(const std::vector<std::uint8_t>& bytes) {
  constexpr std::size_t header = 4 + 4 + 8;
  if (bytes.size() < 4) throw CheckpointError(Kind::truncated, "truncated checkpoint: missing header");
  if (std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0)
    throw CheckpointError(Kind::bad_magic, "bad magic: not a checkpoint file");
  if (bytes.size() < header) throw CheckpointError(Kind::truncated, "truncated checkpoint: missing header");
  std::uint32_t version;
  std::memcpy(&version, bytes.data() + 4, 4);
  if (version != kCheckpointVersion)
    throw CheckpointError(Kind::bad_version, "unsupported checkpoint version " + std::to_string(version) +
                                                 " (expected " + std::to_string(kCheckpointVersion) + ")");
  std::uint64_t length;
  std::memcpy(&length, bytes.data() + 8, 8);
  if (length > bytes.size() - header || bytes.size() - header - length < 8)
    throw CheckpointError(Kind::truncated, "truncated checkpoint: expected " + std::to_string(length + header + 8) +
                                               " bytes, found " + std::to_string(bytes.size()));
  if (bytes.size() - header - length > 8) throw CheckpointError(Kind::corrupt, "corrupt checkpoint: trailing bytes");
  const std::uint8_t* body = bytes.data() + header;
  std::uint64_t stored;
  std::memcpy(&stored, body + length, 8);
  if (stored != fnv1a(body, length)) throw CheckpointError(Kind::corrupt, "corrupt checkpoint: checksum mismatch");

  Reader r(body, length);
  AvatarModel<float> model;
  model.config = read_config(r);
  try {
    model.config.validate();
  } catch (const ConfigError& e) {
    throw CheckpointError(Kind::corrupt, std::string("corrupt checkpoint config: ") + e.what());
  }
  const auto nl = r.get_count(64, "level count");
  std::vector<FeatureMap<float>> levels;
  for (std::uint32_t i = 0; i < nl; ++i) {
    const int res = static_cast<int>(r.get_count(1u << 14, "level resolution"));
    const int ch = static_cast<int>(r.get_count(1u << 12, "level channels"));
    FeatureMap<float> map(res, ch);
    r.get_floats(map.data, map.data.size());
    levels.push_back(std::move(map));
  }
  model.mapper = read_mlp(r);
  for (auto& h : model.heads) h = read_mlp(r);

  Mesh& m = model.mesh;
  const auto nv = r.get_count(1u << 26, "vertex count");
  m.vertices.resize(nv);
  for (Vec3& v : m.vertices)
    for (int a = 0; a < 3; ++a) v[a] = r.get<double>();
  const auto nf = r.get_count(1u << 26, "face count");
  m.faces.resize(nf);
  for (auto& f : m.faces)
    for (auto& i : f) i = r.get<std::uint32_t>();
  m.uvs.resize(nv);
  for (Vec2& uv : m.uvs) {
    uv.x() = r.get<double>();
    uv.y() = r.get<double>();
  }
  const auto nb = r.get_count(4096, "blendshape count");
  m.blendshapes.assign(nb, std::vector<Vec3>(nv));
  for (auto& b : m.blendshapes)
    for (Vec3& v : b)
      for (int a = 0; a < 3; ++a) v[a] = r.get<double>();
  if (!r.done()) throw CheckpointError(Kind::corrupt, "corrupt checkpoint: unparsed bytes at end of body");

  try {
    model.field = FeatureField<float>(std::move(levels), model.config.tau, model.config.s_min, model.config.s_max);
    m.validate();
    model.check_consistency();
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(Kind::corrupt, std::string("corrupt checkpoint: ") + e.what());
  }
  return model;
}

void save_checkpoint(const AvatarModel<float>& model, const std::filesystem::path& path) {
  const auto bytes = serialize_checkpoint(model);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CheckpointError(Kind::io, "cannot write " + path.string());
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw CheckpointError(Kind::io, "failed writing " + path.string());
}

AvatarModel<float> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError(Kind::io, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace lodhead
