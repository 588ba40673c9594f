// SPDX-License-Identifier: Apache-2.0

#include "atn/optim/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace atn {
namespace {

void check_lists(ParamList params, GradList grads, const char* what) {
  if (params.size() != grads.size()) {
    throw ShapeError(std::string(what) + ": " + std::to_string(params.size()) +
                     " parameters but " + std::to_string(grads.size()) + " gradients");
  }
  for (std::size_t i = 0; i < params.size(); ++i) require_same_shape(*params[i], *grads[i], what);
}

void prepare(std::vector<Matrix>& acc, ParamList params, const char* what) {
  if (acc.empty()) {
    for (const Matrix* p : params) acc.emplace_back(p->rows(), p->cols());
    return;
  }
  if (acc.size() != params.size()) {
    throw ShapeError(std::string(what) + ": state holds " + std::to_string(acc.size()) +
                     " tensors, got " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) require_same_shape(acc[i], *params[i], what);
}

}  // namespace

OptimizerKind parse_optimizer_kind(std::string_view name) {
  if (name == "sgd") return OptimizerKind::sgd;
  if (name == "rmsprop") return OptimizerKind::rmsprop;
  if (name == "adam") return OptimizerKind::adam;
  throw std::invalid_argument("unknown optimizer '" + std::string(name) +
                              "' (expected sgd, rmsprop or adam)");
}

std::string_view to_string(OptimizerKind kind) noexcept {
  switch (kind) {
    case OptimizerKind::sgd: return "sgd";
    case OptimizerKind::rmsprop: return "rmsprop";
    case OptimizerKind::adam: return "adam";
  }
  return "?";
}

void sgd_step(OptState& state, ParamList params, GradList grads) {
  check_lists(params, grads, "sgd_step");
  const double lr = state.config.lr;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& p = *params[i];
    const Matrix& g = *grads[i];
    for (std::size_t e = 0; e < p.size(); ++e) p[e] -= lr * g[e];
  }
  ++state.steps;
}

void rmsprop_step(OptState& state, ParamList params, GradList grads) {
  check_lists(params, grads, "rmsprop_step");
  prepare(state.second, params, "rmsprop_step");
  const auto& c = state.config;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& p = *params[i];
    Matrix& v = state.second[i];
    const Matrix& g = *grads[i];
    for (std::size_t e = 0; e < p.size(); ++e) {
      v[e] = c.rho * v[e] + (1.0 - c.rho) * g[e] * g[e];
      p[e] -= c.lr * g[e] / (std::sqrt(v[e]) + c.eps);
    }
  }
  ++state.steps;
}

void adam_step(OptState& state, ParamList params, GradList grads) {
  check_lists(params, grads, "adam_step");
  prepare(state.first, params, "adam_step");
  prepare(state.second, params, "adam_step");
  const auto& c = state.config;
  ++state.steps;
  const double step = static_cast<double>(state.steps);
  const double correct1 = 1.0 - std::pow(c.beta1, step);
  const double correct2 = 1.0 - std::pow(c.beta2, step);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& p = *params[i];
    Matrix& m = state.first[i];
    Matrix& v = state.second[i];
    const Matrix& g = *grads[i];
    for (std::size_t e = 0; e < p.size(); ++e) {
      m[e] = c.beta1 * m[e] + (1.0 - c.beta1) * g[e];
      v[e] = c.beta2 * v[e] + (1.0 - c.beta2) * g[e] * g[e];
      p[e] -= c.lr * (m[e] / correct1) / (std::sqrt(v[e] / correct2) + c.eps);
    }
  }
}

void optimizer_step(OptState& state, ParamList params, GradList grads) {
  switch (state.config.kind) {
    case OptimizerKind::sgd: return sgd_step(state, params, grads);
    case OptimizerKind::rmsprop: return rmsprop_step(state, params, grads);
    case OptimizerKind::adam: return adam_step(state, params, grads);
  }
}

double global_norm(GradList grads) {
  double sq = 0.0;
  for (const Matrix* g : grads) sq += sum_squares(*g);
  return std::sqrt(sq);
}

double clip_global_norm(ParamList grads, double max_norm) {
  if (!(max_norm > 0.0)) throw std::invalid_argument("clip_global_norm: max_norm must be > 0");
  double sq = 0.0;
  for (const Matrix* g : grads) sq += sum_squares(*g);
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double s = max_norm / norm;
    for (Matrix* g : grads) *g *= s;
  }
  return norm;
}

}  // namespace atn
