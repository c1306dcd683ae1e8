// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "lodhead/dataset.hpp"
#include "lodhead/model.hpp"
#include "lodhead/trainer.hpp"

namespace lodhead {

/// Parsed `key = value` lines. Blank lines and lines starting with '#' are
/// ignored; duplicate keys and malformed lines raise ConfigError.
std::map<std::string, std::string> parse_key_values(const std::string& text, const std::string& origin);

/// Everything `lodhead train` needs.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  SyntheticOptions synthetic;
  bool generate = false;               // synthesise the dataset instead of loading it
  std::filesystem::path dataset;       // loaded from, or written to when generating
  std::filesystem::path checkpoint;    // output
  std::filesystem::path loss_csv;      // optional
  int log_every = 100;

  void validate() const;  // throws ConfigError
};

/// Unknown keys are rejected with the key name and line. Relative paths are
/// resolved against `base_dir`.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = {},
                           const std::string& origin = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

/// Every recognised key, for documentation and --help output.
const std::map<std::string, std::string>& run_config_keys();

}  // namespace lodhead
