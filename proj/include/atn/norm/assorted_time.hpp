// SPDX-License-Identifier: Apache-2.0
//
// Assorted-time normalization. Each call normalizes only the current
// preactivation a(t), but its mean and variance pool every entry of the
// last k preactivations a(t-k+1) ... a(t) of the same batch sample:
//
//   mu(t)  = 1/(n k_t) sum_j sum_s a_s(t-j)
//   var(t) = 1/(n k_t) sum_j sum_s (a_s(t-j) - mu(t))^2
//   y(t)   = gamma * (a(t) - mu(t)) / sqrt(var(t) + eps) + beta
//
// During warm-up the window grows, k_t = min(t, k), so the first step of a
// sequence is plain layer normalization. Statistics never mix batch rows.

#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "atn/norm/layer_norm.hpp"

namespace atn {

/// Sliding window over the last `capacity` raw preactivations of a sequence.
class AtnBuffer {
 public:
  /// One buffered preactivation with its per-row mean and centered sum of
  /// squares, so window statistics combine in O(k) per row.
  struct Entry {
    Matrix a;     ///< (batch x n)
    Matrix mean;  ///< (batch x 1)
    Matrix m2;    ///< (batch x 1), sum_s (a_s - mean)^2
  };

  explicit AtnBuffer(std::size_t capacity);

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t fill() const noexcept { return entries_.size(); }
  /// Oldest first.
  const std::deque<Entry>& entries() const noexcept { return entries_; }

  /// Appends `a`, evicting the oldest entry when the window is full.
  void push(const Matrix& a);
  /// Empties the window; the next push behaves as the first step of a sequence.
  void reset() noexcept { entries_.clear(); }

 private:
  std::size_t capacity_;
  std::deque<Entry> entries_;
};

/// Forward record of one normalized step.
struct AtnStepRecord {
  Matrix a;        ///< the normalized preactivation a(t), (batch x n)
  Matrix mean;     ///< window mean per row, (batch x 1)
  Matrix var;      ///< window variance per row, (batch x 1)
  Matrix inv_std;  ///< 1 / sqrt(var + eps), (batch x 1)
  std::size_t window = 0;  ///< effective window k_t
};

/// Everything the backward pass needs for a run of consecutive steps.
///
/// Window contents are not copied per step: step t's window is the tail of
/// the recorded inputs, reaching into `prefix` when the tape was started on a
/// buffer that already held entries (a resumed sequence).
class AtnTape {
 public:
  std::size_t size() const noexcept { return steps_.size(); }
  bool empty() const noexcept { return steps_.empty(); }
  const AtnStepRecord& step(std::size_t t) const { return steps_.at(t); }
  const std::vector<Matrix>& prefix() const noexcept { return prefix_; }

  /// Preactivation at tape index `index`; negative indices address the prefix
  /// (-1 is its newest entry).
  const Matrix& input(std::ptrdiff_t index) const;

  void clear() noexcept {
    steps_.clear();
    prefix_.clear();
  }

 private:
  friend Matrix atn_forward_step(AtnBuffer&, const Matrix&, const NormParams&, AtnTape*);
  std::vector<Matrix> prefix_;
  std::vector<AtnStepRecord> steps_;
};

/// Pushes `a` into `buffer` and returns the normalized current step. When
/// `tape` is non-null the step is recorded for the backward pass.
Matrix atn_forward_step(AtnBuffer& buffer, const Matrix& a, const NormParams& params,
                        AtnTape* tape);

/// Reverse-mode pass through a recorded ATN sequence, one step at a time.
///
/// The normalization at step t depends on every buffered preactivation
/// a(t-j), j < k_t, so its gradient fans out to all of them. For window
/// entry u of step t with N = n k_t and g = dy(t) * gamma:
///
///   da_s(u) += [delta(u,t) g_s - sum(g)/N - xhat_s(u) sum(g xhat(t))/N] / sigma
///
/// with xhat(u) = (a(u) - mu(t)) / sigma. The last two terms are affine in
/// a(u), so each window only adds two scalars per row to the accumulators of
/// the steps it covers. Calling step(t) for t = T-1 down to 0 therefore costs
/// O(k + n) per row and step, and step(t) returns the complete gradient of
/// a(t) because every window containing t has already been visited.
///
/// Gradients that would flow into the tape prefix are dropped.
class AtnBackward {
 public:
  AtnBackward(const AtnTape& tape, const NormParams& params, bool stop_window_gradient = false);

  /// Consumes dL/dy(t) and returns dL/da(t). Steps must be visited in
  /// strictly decreasing order starting from the last recorded one.
  Matrix step(std::size_t t, const Matrix& dy);

  const NormParamGrads& param_grads() const noexcept { return grads_; }

 private:
  const AtnTape& tape_;
  const NormParams& params_;
  bool stop_window_;
  std::size_t next_;
  // Per recorded step: da(u) gets coef_const(u) + coef_lin(u) * a(u), per row.
  std::vector<Matrix> coef_const_;
  std::vector<Matrix> coef_lin_;
  NormParamGrads grads_;
};

struct AtnGrads {
  std::vector<Matrix> da;  ///< one (batch x n) gradient per recorded step
  NormParamGrads params;
};

/// Whole-sequence backward. Throws std::invalid_argument when `dy_seq` and
/// the tape differ in length. With `stop_window_gradient`, each step only
/// differentiates through its own preactivation (j = 0).
AtnGrads atn_backward(const AtnTape& tape, std::span<const Matrix> dy_seq,
                      const NormParams& params, bool stop_window_gradient = false);

}  // namespace atn
