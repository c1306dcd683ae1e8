// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#include "lodhead/export.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lodhead/errors.hpp"

namespace lodhead {
namespace {

std::vector<std::string> property_names(int sh_stride) {
  std::vector<std::string> n{"x", "y", "z", "scale_0", "scale_1", "scale_2", "rot_0", "rot_1", "rot_2", "rot_3",
                             "opacity"};
  for (int i = 0; i < sh_stride; ++i) n.push_back("sh_" + std::to_string(i));
  return n;
}

}  // namespace

void write_gaussians_ply(const std::filesystem::path& path, const GaussianSet<float>& set) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write " + path.string());
  const int stride = set.sh_stride();
  os << "ply\nformat binary_little_endian 1.0\ncomment sh_degree " << set.sh_degree << "\nelement vertex "
     << set.size() << "\n";
  for (const auto& name : property_names(stride)) os << "property float " << name << "\n";
  os << "end_header\n";
  std::vector<float> rec(11 + stride);
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (int a = 0; a < 3; ++a) {
      rec[a] = set.means[3 * i + a];
      rec[3 + a] = set.scales[3 * i + a];
    }
    for (int a = 0; a < 4; ++a) rec[6 + a] = set.rotations[4 * i + a];
    rec[10] = set.opacities[i];
    for (int k = 0; k < stride; ++k) rec[11 + k] = set.sh[i * stride + k];
    os.write(reinterpret_cast<const char*>(rec.data()), static_cast<std::streamsize>(rec.size() * sizeof(float)));
  }
  if (!os) throw DataError("failed writing " + path.string());
}

GaussianSet<float> read_gaussians_ply(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open " + path.string());
  std::string line;
  std::vector<std::string> props;
  std::size_t count = 0;
  int degree = -1;
  if (!std::getline(is, line) || line != "ply") throw DataError(path.string() + " is not a PLY file");
  while (std::getline(is, line) && line != "end_header") {
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "binary_little_endian") throw DataError("only binary little-endian PLY is supported");
    } else if (word == "comment") {
      std::string tag;
      if (ls >> tag && tag == "sh_degree") ls >> degree;
    } else if (word == "element") {
      std::string what;
      ls >> what >> count;
    } else if (word == "property") {
      std::string type, name;
      ls >> type >> name;
      if (type != "float") throw DataError("unexpected PLY property type " + type);
      props.push_back(name);
    }
  }
  if (degree < 0 || degree > kMaxShDegree) throw DataError("PLY is missing a valid sh_degree comment");
  GaussianSet<float> set;
  set.sh_degree = degree;
  const int stride = set.sh_stride();
  if (props != property_names(stride)) throw DataError("PLY property list does not match the Gaussian layout");
  set.resize(count);
  std::vector<float> rec(props.size());
  for (std::size_t i = 0; i < count; ++i) {
    if (!is.read(reinterpret_cast<char*>(rec.data()), static_cast<std::streamsize>(rec.size() * sizeof(float))))
      throw DataError("PLY body is truncated");
    for (int a = 0; a < 3; ++a) {
      set.means[3 * i + a] = rec[a];
      set.scales[3 * i + a] = rec[3 + a];
    }
    for (int a = 0; a < 4; ++a) set.rotations[4 * i + a] = rec[6 + a];
    set.opacities[i] = rec[10];
    for (int k = 0; k < stride; ++k) set.sh[i * stride + k] = rec[11 + k];
  }
  return set;
}

}  // namespace lodhead
