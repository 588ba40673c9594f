// SPDX-License-Identifier: Apache-2.0
//
// Layer normalization over the feature axis of a (batch x n) matrix:
//   y = gamma * (a - mean) / sqrt(var + eps) + beta
// with the population variance (divide by n) of each row.

#pragma once

#include <cstddef>

#include "atn/numkit/matrix.hpp"

namespace atn {

inline constexpr double kDefaultNormEpsilon = 1e-5;

/// Gain, bias and stabilizer for one normalization group of width n.
struct NormParams {
  Matrix gamma;  ///< (1 x n), initialized to ones
  Matrix beta;   ///< (1 x n), initialized to zeros
  double epsilon = kDefaultNormEpsilon;
  /// When false, gamma and beta stay at their initial values during training.
  bool trainable = true;

  static NormParams make(std::size_t n, double epsilon = kDefaultNormEpsilon,
                         bool trainable = true);
  std::size_t width() const noexcept { return gamma.cols(); }
};

/// Gradients of a normalization with respect to its gain and bias.
struct NormParamGrads {
  Matrix dgamma;
  Matrix dbeta;
};

struct LnCache {
  Matrix xhat;     ///< (a - mean) / sqrt(var + eps), (batch x n)
  Matrix inv_std;  ///< 1 / sqrt(var + eps), (batch x 1)
  Matrix var;      ///< population variance per row, (batch x 1)
};

struct LnForward {
  Matrix y;
  LnCache cache;
};

struct LnBackward {
  Matrix da;
  NormParamGrads params;
};

LnForward ln_forward(const Matrix& a, const NormParams& params);
LnBackward ln_backward(const LnCache& cache, const Matrix& dy, const NormParams& params);

/// Throws ShapeError unless `a` is (batch x params.width()).
void require_norm_width(const Matrix& a, const NormParams& params, const char* what);

}  // namespace atn
