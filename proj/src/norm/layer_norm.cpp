// SPDX-License-Identifier: Apache-2.0

#include "atn/norm/layer_norm.hpp"

#include <cmath>
#include <string>

namespace atn {

NormParams NormParams::make(std::size_t n, double epsilon, bool trainable) {
  if (n == 0) throw std::invalid_argument("NormParams: width must be positive");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("NormParams: epsilon must be >= 0");
  return NormParams{Matrix(1, n, 1.0), Matrix(1, n, 0.0), epsilon, trainable};
}

void require_norm_width(const Matrix& a, const NormParams& params, const char* what) {
  if (a.cols() != params.width() || params.beta.cols() != params.width()) {
    throw ShapeError(std::string(what) + ": input " + a.shape_string() +
                     " does not match normalization width " +
                     std::to_string(params.width()));
  }
}

LnForward ln_forward(const Matrix& a, const NormParams& params) {
  require_norm_width(a, params, "ln_forward");
  const std::size_t batch = a.rows();
  const std::size_t n = a.cols();
  LnForward out{Matrix(batch, n), {Matrix(batch, n), Matrix(batch, 1), Matrix(batch, 1)}};
  for (std::size_t b = 0; b < batch; ++b) {
    auto row = a.row(b);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(n);
    double m2 = 0.0;
    for (double v : row) m2 += (v - mean) * (v - mean);
    const double var = m2 / static_cast<double>(n);
    const double inv_std = 1.0 / std::sqrt(var + params.epsilon);
    out.cache.var[b] = var;
    out.cache.inv_std[b] = inv_std;
    auto xhat = out.cache.xhat.row(b);
    auto y = out.y.row(b);
    for (std::size_t i = 0; i < n; ++i) {
      xhat[i] = (row[i] - mean) * inv_std;
      y[i] = params.gamma[i] * xhat[i] + params.beta[i];
    }
  }
  return out;
}

LnBackward ln_backward(const LnCache& cache, const Matrix& dy, const NormParams& params) {
  require_same_shape(cache.xhat, dy, "ln_backward");
  const std::size_t batch = dy.rows();
  const std::size_t n = dy.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  LnBackward out{Matrix(batch, n), {Matrix(1, n), Matrix(1, n)}};
  for (std::size_t b = 0; b < batch; ++b) {
    auto d = dy.row(b);
    auto xhat = cache.xhat.row(b);
    double g_sum = 0.0;
    double gx_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double g = d[i] * params.gamma[i];
      g_sum += g;
      gx_sum += g * xhat[i];
      out.params.dgamma[i] += d[i] * xhat[i];
      out.params.dbeta[i] += d[i];
    }
    const double inv_std = cache.inv_std[b];
    auto da = out.da.row(b);
    for (std::size_t i = 0; i < n; ++i) {
      const double g = d[i] * params.gamma[i];
      da[i] = inv_std * (g - g_sum * inv_n - xhat[i] * gx_sum * inv_n);
    }
  }
  return out;
}

}  // namespace atn
