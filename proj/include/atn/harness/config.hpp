// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration. Config files are flat "key = value" text with
// '#' comments; keys prefixed with "quick." only apply under --quick and take
// precedence over their plain counterparts.

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "atn/cells/norm_site.hpp"
#include "atn/optim/optimizer.hpp"
#include "atn/tasks/task_batch.hpp"

namespace atn {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TrainConfig {
  TaskKind task = TaskKind::copy;
  std::size_t T = 100;
  NormMode mode = NormMode::plain;
  /// ATN window; ignored unless mode is atn.
  std::size_t k = 1;
  std::size_t hidden = 68;
  std::size_t batch = 128;
  OptimizerKind optimizer = OptimizerKind::rmsprop;
  double lr = 1e-4;
  /// Global-norm clipping threshold; 0 disables clipping.
  double clip_norm = 0.0;
  double epsilon = kDefaultNormEpsilon;
  bool gamma_beta_trainable = true;
  bool bias_inside_norm = false;
  bool normalize_readout = false;
  bool stop_window_gradient = false;
  double forget_bias = 1.0;
  std::uint64_t seed = 1;
  std::size_t iterations = 1000;
  std::size_t eval_every = 50;
  std::size_t val_batch = 256;
  /// Gaussian input noise variance for mnist-pixel.
  double noise_var = 0.1;
  /// Directory holding the four standard MNIST IDX files.
  std::filesystem::path mnist_dir;
  /// Where metrics.csv / stats.json go; empty writes nothing.
  std::filesystem::path output_dir;
  /// Records seconds since start in metrics.csv. Off by default so that the
  /// file is a pure function of the config.
  bool log_wall_time = false;
};

/// Sets one field from its textual value. Throws ConfigError naming the key.
void set_config_value(TrainConfig& config, std::string_view key, std::string_view value);

/// Parses config text over `base`; `quick` enables the "quick." keys.
TrainConfig parse_config(std::string_view text, bool quick, TrainConfig base = {});
TrainConfig load_config(const std::filesystem::path& path, bool quick);

/// Rejects invalid values and combinations with a message naming the field.
void validate(const TrainConfig& config);

/// Canonical "key = value" listing of every field.
std::string to_config_text(const TrainConfig& config);

std::vector<std::string> config_keys();

}  // namespace atn
