// SPDX-License-Identifier: Apache-2.0

#include "atn/norm/assorted_time.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace atn {

AtnBuffer::AtnBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("AtnBuffer: window length k must be >= 1");
}

void AtnBuffer::push(const Matrix& a) {
  if (!entries_.empty() && !entries_.back().a.same_shape(a)) {
    throw ShapeError("AtnBuffer::push: " + a.shape_string() + " after " +
                     entries_.back().a.shape_string());
  }
  Entry e{a, Matrix(a.rows(), 1), Matrix(a.rows(), 1)};
  for (std::size_t b = 0; b < a.rows(); ++b) {
    auto row = a.row(b);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(a.cols());
    double m2 = 0.0;
    for (double v : row) m2 += (v - mean) * (v - mean);
    e.mean[b] = mean;
    e.m2[b] = m2;
  }
  if (entries_.size() == capacity_) entries_.pop_front();
  entries_.push_back(std::move(e));
}

const Matrix& AtnTape::input(std::ptrdiff_t index) const {
  if (index >= 0) return steps_.at(static_cast<std::size_t>(index)).a;
  const auto back = static_cast<std::ptrdiff_t>(prefix_.size()) + index;
  if (back < 0) throw std::out_of_range("AtnTape::input: index before the recorded window");
  return prefix_[static_cast<std::size_t>(back)];
}

Matrix atn_forward_step(AtnBuffer& buffer, const Matrix& a, const NormParams& params,
                        AtnTape* tape) {
  require_norm_width(a, params, "atn_forward_step");
  if (tape != nullptr && tape->steps_.empty()) {
    tape->prefix_.clear();
    for (const auto& e : buffer.entries()) tape->prefix_.push_back(e.a);
  }
  buffer.push(a);

  const auto& entries = buffer.entries();
  const std::size_t window = entries.size();
  const std::size_t batch = a.rows();
  const std::size_t n = a.cols();
  const double count = static_cast<double>(n * window);

  AtnStepRecord rec{a, Matrix(batch, 1), Matrix(batch, 1), Matrix(batch, 1), window};
  Matrix y(batch, n);
  for (std::size_t b = 0; b < batch; ++b) {
    // Pooled mean and variance from per-entry moments (Chan et al. merge).
    double mean = 0.0;
    for (const auto& e : entries) mean += e.mean[b];
    mean /= static_cast<double>(window);
    double m2 = 0.0;
    for (const auto& e : entries) {
      const double d = e.mean[b] - mean;
      m2 += e.m2[b] + static_cast<double>(n) * d * d;
    }
    const double var = m2 / count;
    const double inv_std = 1.0 / std::sqrt(var + params.epsilon);
    rec.mean[b] = mean;
    rec.var[b] = var;
    rec.inv_std[b] = inv_std;
    auto in = a.row(b);
    auto out = y.row(b);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = params.gamma[i] * ((in[i] - mean) * inv_std) + params.beta[i];
    }
  }
  if (tape != nullptr) tape->steps_.push_back(std::move(rec));
  return y;
}

AtnBackward::AtnBackward(const AtnTape& tape, const NormParams& params, bool stop_window_gradient)
    : tape_(tape),
      params_(params),
      stop_window_(stop_window_gradient),
      next_(tape.size()),
      grads_{Matrix(1, params.width()), Matrix(1, params.width())} {
  coef_const_.reserve(tape.size());
  coef_lin_.reserve(tape.size());
  for (std::size_t t = 0; t < tape.size(); ++t) {
    const std::size_t batch = tape.step(t).a.rows();
    coef_const_.emplace_back(batch, 1);
    coef_lin_.emplace_back(batch, 1);
  }
}

Matrix AtnBackward::step(std::size_t t, const Matrix& dy) {
  if (next_ == 0 || t != next_ - 1) {
    throw std::logic_error("AtnBackward::step: expected step " +
                           (next_ == 0 ? std::string("<none>") : std::to_string(next_ - 1)) +
                           ", got " + std::to_string(t));
  }
  next_ = t;
  const AtnStepRecord& rec = tape_.step(t);
  require_same_shape(rec.a, dy, "AtnBackward::step");
  const std::size_t batch = dy.rows();
  const std::size_t n = dy.cols();
  const std::size_t window = stop_window_ ? 1 : rec.window;
  const double inv_count = 1.0 / static_cast<double>(n * rec.window);

  Matrix da(batch, n);
  for (std::size_t b = 0; b < batch; ++b) {
    const double mean = rec.mean[b];
    const double inv_std = rec.inv_std[b];
    auto d = dy.row(b);
    auto in = rec.a.row(b);
    double g_sum = 0.0;
    double gx_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double g = d[i] * params_.gamma[i];
      const double xhat = (in[i] - mean) * inv_std;
      g_sum += g;
      gx_sum += g * xhat;
      grads_.dgamma[i] += d[i] * xhat;
      grads_.dbeta[i] += d[i];
    }
    // Affine coefficients of this window's contribution to every entry u:
    // -g_sum/(N sigma) - (a(u) - mu) gx_sum/(N sigma^2).
    const double lin = -gx_sum * inv_std * inv_std * inv_count;
    const double cst = -g_sum * inv_std * inv_count - mean * lin;
    for (std::size_t j = 0; j < window; ++j) {
      const auto u = static_cast<std::ptrdiff_t>(t) - static_cast<std::ptrdiff_t>(j);
      if (u < 0) break;
      coef_const_[static_cast<std::size_t>(u)][b] += cst;
      coef_lin_[static_cast<std::size_t>(u)][b] += lin;
    }
    const double c0 = coef_const_[t][b];
    const double c1 = coef_lin_[t][b];
    auto out = da.row(b);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = d[i] * params_.gamma[i] * inv_std + c0 + c1 * in[i];
    }
  }
  return da;
}

AtnGrads atn_backward(const AtnTape& tape, std::span<const Matrix> dy_seq,
                      const NormParams& params, bool stop_window_gradient) {
  if (dy_seq.size() != tape.size()) {
    throw std::invalid_argument("atn_backward: " + std::to_string(dy_seq.size()) +
                                " gradients for a tape of " + std::to_string(tape.size()) +
                                " steps");
  }
  AtnBackward backward(tape, params, stop_window_gradient);
  AtnGrads out;
  out.da.resize(tape.size());
  for (std::size_t t = tape.size(); t-- > 0;) out.da[t] = backward.step(t, dy_seq[t]);
  out.params = backward.param_grads();
  return out;
}

}  // namespace atn
