// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "lodhead/model.hpp"

namespace lodhead {

inline constexpr char kCheckpointMagic[4] = {'A', 'L', 'O', 'D'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  enum class Kind { io, truncated, bad_magic, bad_version, corrupt };
  CheckpointError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

const char* checkpoint_error_name(CheckpointError::Kind kind);

/// Layout (little-endian):
///   "ALOD", u32 version, u64 body length, body, u64 FNV-1a of body.
/// Body: config block; feature field (u32 levels, then per level u32
/// resolution, u32 channels, f32 data); mapper; five heads in the order
/// offset, scale, rotation, opacity, colour; then the mesh (f64 vertices,
/// u32 faces, f64 uvs, f64 blendshapes).
/// Each network: u32 layer count, then per layer u32 in, u32 out,
/// u8 activation, f32 weights (out x in, row-major), f32 bias.
std::vector<std::uint8_t> serialize_checkpoint(const AvatarModel<float>& model);
AvatarModel<float> deserialize_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const AvatarModel<float>& model, const std::filesystem::path& path);
AvatarModel<float> load_checkpoint(const std::filesystem::path& path);

}  // namespace lodhead
