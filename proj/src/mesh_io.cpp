// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "lodhead/geometry.hpp"

namespace lodhead {
namespace {

// "12/7" or "12/7/3" -> (11, 6); vt is mandatory.
std::pair<long, long> parse_corner(const std::string& tok, std::size_t line_no) {
  const auto slash = tok.find('/');
  if (slash == std::string::npos) throw std::runtime_error("OBJ line " + std::to_string(line_no) + ": face corner lacks a UV index");
  const auto slash2 = tok.find('/', slash + 1);
  const long v = std::stol(tok.substr(0, slash));
  const long t = std::stol(tok.substr(slash + 1, slash2 == std::string::npos ? std::string::npos : slash2 - slash - 1));
  return {v - 1, t - 1};
}

}  // namespace

Mesh load_mesh(const std::filesystem::path& obj_path, const std::filesystem::path& blendshape_path) {
  std::ifstream in(obj_path);
  if (!in) throw std::runtime_error("cannot open mesh " + obj_path.string());
  std::vector<Vec3> positions;
  std::vector<Vec2> texcoords;
  Mesh mesh;
  std::vector<std::uint32_t> source_position;
  std::map<std::pair<long, long>, std::uint32_t> unified;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 p;
      ls >> p.x() >> p.y() >> p.z();
      if (!ls) throw std::runtime_error("OBJ line " + std::to_string(line_no) + ": malformed vertex");
      positions.push_back(p);
    } else if (tag == "vt") {
      Vec2 t;
      ls >> t.x() >> t.y();
      if (!ls) throw std::runtime_error("OBJ line " + std::to_string(line_no) + ": malformed texture coordinate");
      texcoords.push_back(t);
    } else if (tag == "f") {
      std::vector<std::uint32_t> corners;
      std::string tok;
      while (ls >> tok) {
        const auto key = parse_corner(tok, line_no);
        if (key.first < 0 || key.first >= static_cast<long>(positions.size()) || key.second < 0 ||
            key.second >= static_cast<long>(texcoords.size()))
          throw std::runtime_error("OBJ line " + std::to_string(line_no) + ": index out of range");
        auto [it, inserted] = unified.try_emplace(key, static_cast<std::uint32_t>(mesh.vertices.size()));
        if (inserted) {
          mesh.vertices.push_back(positions[static_cast<std::size_t>(key.first)]);
          mesh.uvs.push_back(texcoords[static_cast<std::size_t>(key.second)]);
          source_position.push_back(static_cast<std::uint32_t>(key.first));
        }
        corners.push_back(it->second);
      }
      if (corners.size() < 3) throw std::runtime_error("OBJ line " + std::to_string(line_no) + ": face with fewer than 3 corners");
      for (std::size_t k = 1; k + 1 < corners.size(); ++k) mesh.faces.push_back({corners[0], corners[k], corners[k + 1]});
    }
  }

  if (!blendshape_path.empty()) {
    std::ifstream bs(blendshape_path, std::ios::binary);
    if (!bs) throw std::runtime_error("cannot open blendshapes " + blendshape_path.string());
    std::uint32_t count = 0;
    bs.read(reinterpret_cast<char*>(&count), sizeof(count));
    if (!bs) throw std::runtime_error("blendshape file is truncated");
    std::vector<float> raw(positions.size() * 3);
    for (std::uint32_t k = 0; k < count; ++k) {
      bs.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(float)));
      if (!bs) throw std::runtime_error("blendshape file is truncated");
      std::vector<Vec3> basis(mesh.vertices.size());
      for (std::size_t v = 0; v < basis.size(); ++v) {
        const std::size_t p = source_position[v];
        basis[v] = Vec3(raw[3 * p], raw[3 * p + 1], raw[3 * p + 2]);
      }
      mesh.blendshapes.push_back(std::move(basis));
    }
  }
  mesh.validate();
  return mesh;
}

void save_mesh(const Mesh& mesh, const std::filesystem::path& obj_path, const std::filesystem::path& blendshape_path) {
  std::ofstream out(obj_path);
  if (!out) throw std::runtime_error("cannot write mesh " + obj_path.string());
  out.precision(17);
  for (const Vec3& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const Vec2& t : mesh.uvs) out << "vt " << t.x() << ' ' << t.y() << '\n';
  for (const auto& f : mesh.faces)
    out << "f " << f[0] + 1 << '/' << f[0] + 1 << ' ' << f[1] + 1 << '/' << f[1] + 1 << ' ' << f[2] + 1 << '/'
        << f[2] + 1 << '\n';
  if (blendshape_path.empty()) return;
  std::ofstream bs(blendshape_path, std::ios::binary);
  if (!bs) throw std::runtime_error("cannot write blendshapes " + blendshape_path.string());
  const auto count = static_cast<std::uint32_t>(mesh.blendshapes.size());
  bs.write(reinterpret_cast<const char*>(&count), sizeof(count));
  for (const auto& basis : mesh.blendshapes)
    for (const Vec3& d : basis)
      for (int c = 0; c < 3; ++c) {
        const auto f = static_cast<float>(d[c]);
        bs.write(reinterpret_cast<const char*>(&f), sizeof(f));
      }
}

}  // namespace lodhead
