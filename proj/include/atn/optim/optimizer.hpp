// SPDX-License-Identifier: Apache-2.0
//
// First-order optimizers over a list of parameter tensors. Parameters and
// gradients are passed as parallel lists of pointers; the state allocates its
// accumulators on the first step and afterwards requires the same shapes.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "atn/numkit/matrix.hpp"

namespace atn {

enum class OptimizerKind { sgd, rmsprop, adam };

OptimizerKind parse_optimizer_kind(std::string_view name);
std::string_view to_string(OptimizerKind kind) noexcept;

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::rmsprop;
  double lr = 1e-3;
  double rho = 0.99;  ///< RMSProp decay
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct OptState {
  OptimizerConfig config;
  /// Adam first moments.
  std::vector<Matrix> first;
  /// RMSProp / Adam second moments.
  std::vector<Matrix> second;
  std::uint64_t steps = 0;

  OptState() = default;
  explicit OptState(const OptimizerConfig& c) : config(c) {}
};

using ParamList = std::span<Matrix* const>;
using GradList = std::span<const Matrix* const>;

/// p -= lr g
void sgd_step(OptState& state, ParamList params, GradList grads);
/// v = rho v + (1 - rho) g^2;  p -= lr g / (sqrt(v) + eps)
void rmsprop_step(OptState& state, ParamList params, GradList grads);
/// Bias-corrected Adam.
void adam_step(OptState& state, ParamList params, GradList grads);
/// Dispatches on state.config.kind.
void optimizer_step(OptState& state, ParamList params, GradList grads);

/// L2 norm over every entry of every gradient.
double global_norm(GradList grads);

/// Rescales all gradients by max_norm / norm when their joint norm exceeds
/// max_norm. Returns the norm before clipping.
double clip_global_norm(ParamList grads, double max_norm);

}  // namespace atn
