// SPDX-License-Identifier: Apache-2.0

#include "atn/numkit/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace atn {

Matrix softmax_rows(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto in = logits.row(r);
    auto out = p.row(r);
    const double mx = *std::max_element(in.begin(), in.end());
    double z = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      out[c] = std::exp(in[c] - mx);
      z += out[c];
    }
    for (double& v : out) v /= z;
  }
  return p;
}

LossResult cross_entropy_logits(const Matrix& logits, std::span<const int> targets) {
  if (targets.size() != logits.rows()) {
    throw ShapeError("cross_entropy_logits: " + std::to_string(targets.size()) +
                     " targets for logits " + logits.shape_string());
  }
  const double inv_rows = 1.0 / static_cast<double>(logits.rows());
  LossResult out{0.0, Matrix(logits.rows(), logits.cols())};
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const int target = targets[r];
    if (target < 0 || static_cast<std::size_t>(target) >= logits.cols()) {
      throw std::out_of_range("cross_entropy_logits: target " + std::to_string(target) +
                              " outside [0, " + std::to_string(logits.cols()) + ")");
    }
    auto in = logits.row(r);
    auto g = out.grad.row(r);
    const double mx = *std::max_element(in.begin(), in.end());
    double z = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      g[c] = std::exp(in[c] - mx);
      z += g[c];
    }
    out.loss += (std::log(z) + mx - in[target]) * inv_rows;
    for (double& v : g) v = v / z * inv_rows;
    g[target] -= inv_rows;
  }
  return out;
}

LossResult mse(const Matrix& pred, const Matrix& target) {
  require_same_shape(pred, target, "mse");
  const double inv = 1.0 / static_cast<double>(pred.size());
  LossResult out{0.0, Matrix(pred.rows(), pred.cols())};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double r = pred[i] - target[i];
    out.loss += r * r * inv;
    out.grad[i] = 2.0 * r * inv;
  }
  return out;
}

}  // namespace atn
