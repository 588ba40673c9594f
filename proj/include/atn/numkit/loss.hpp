// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "atn/numkit/matrix.hpp"

namespace atn {

struct LossResult {
  double loss = 0.0;
  Matrix grad;  ///< d loss / d input, same shape as the input
};

/// Mean over rows of -log softmax(logits)[row, target[row]].
/// Gradient is (softmax - onehot) / rows. Softmax subtracts the row max first.
LossResult cross_entropy_logits(const Matrix& logits, std::span<const int> targets);

/// Mean squared error over all entries; gradient 2 (pred - target) / count.
LossResult mse(const Matrix& pred, const Matrix& target);

/// Row-wise softmax probabilities.
Matrix softmax_rows(const Matrix& logits);

}  // namespace atn
