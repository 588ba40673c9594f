// SPDX-License-Identifier: Apache-2.0
//
// LSTM cell with optional normalization of both gate branches and of the
// memory cell:
//
//   [f i o g] = N_hh(W_h h(t-1)) + N_ih(W_x x(t)) + b
//   c(t)      = sigmoid(f) * c(t-1) + sigmoid(i) * tanh(g)
//   h(t)      = sigmoid(o) * tanh(N_c(c(t)))
//
// where every N is the identity (plain), layer normalization (ln) or
// assorted-time normalization with a window of k steps (atn). Gates are
// stacked in the order f, i, o, g along the 4n axis of W_h, W_x and b.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "atn/cells/norm_site.hpp"
#include "atn/cells/params.hpp"

namespace atn {

struct LstmOptions {
  std::size_t input = 1;
  std::size_t hidden = 1;
  std::size_t output = 1;
  NormMode mode = NormMode::plain;
  std::size_t k = 1;
  double epsilon = kDefaultNormEpsilon;
  bool gamma_beta_trainable = true;
  /// Adds b to W_x x(t) before N_ih instead of after both norms.
  bool bias_inside_norm = false;
  /// Applies the mode's normalization to W_out h(t) before adding b_out.
  bool normalize_readout = false;
  /// Read out every step (sequence labelling) or only the last one.
  bool readout_every_step = true;
  /// Differentiate each ATN step through its own preactivation only.
  bool stop_window_gradient = false;
  /// Initial value of the forget-gate slots of b.
  double forget_bias = 1.0;
};

struct LstmParams {
  Matrix w_h;  ///< (4n x n)
  Matrix w_x;  ///< (4n x d)
  Matrix b;    ///< (1 x 4n)
  NormParams norm_hh;
  NormParams norm_ih;
  NormParams norm_cell;
  NormMode mode = NormMode::plain;
  std::size_t k = 1;
  bool bias_inside_norm = false;
  bool stop_window_gradient = false;

  std::size_t hidden() const noexcept { return w_h.cols(); }
  std::size_t input() const noexcept { return w_x.cols(); }
};

/// Affine map from the hidden state to task outputs.
struct Readout {
  Matrix w;  ///< (out x n)
  Matrix b;  ///< (1 x out)
  bool normalize = false;
  NormParams norm;
  bool every_step = true;
};

struct LstmModel {
  LstmParams cell;
  Readout readout;

  /// Seeded initialization: fan-in uniform weights, forget-gate bias slots at
  /// options.forget_bias, all other biases zero, gains one, norm biases zero.
  static LstmModel init(const LstmOptions& options, Rng& rng);

  /// Same shapes and flags, every tensor zero. Used as the gradient container.
  LstmModel zeros_like() const;

  /// Trainable tensors in a fixed order. Norm gains/biases appear only when
  /// the mode normalizes and they are trainable.
  std::vector<NamedParam> parameters();
  std::vector<NamedConstParam> parameters() const;
};

/// Recurrent state plus one ATN window per normalization site.
struct LstmState {
  Matrix h;
  Matrix c;
  AtnBuffer hh;
  AtnBuffer ih;
  AtnBuffer cell;
  AtnBuffer out;

  LstmState(const LstmParams& params, std::size_t batch);
  /// Zeroes h and c and empties every window (start of a new sequence).
  void reset();
};

struct LstmStepRecord {
  Matrix x;
  Matrix h_prev;
  Matrix c_prev;
  Matrix f, i, o, g;  ///< activated gates
  Matrix c;
  Matrix cell_norm;   ///< N_c(c(t))
  Matrix cell_tanh;   ///< tanh(N_c(c(t)))
  Matrix hh_norm;     ///< N_hh(W_h h(t-1))
  Matrix ih_norm;     ///< N_ih(W_x x(t) [+ b])
  Matrix h;
};

struct LstmTape {
  std::vector<LstmStepRecord> steps;
  NormSiteTape hh;
  NormSiteTape ih;
  NormSiteTape cell;
  NormSiteTape out;
  /// Step index of every readout, in order.
  std::vector<std::size_t> readout_steps;

  void clear() noexcept;
};

/// One cell update. Returns h(t); updates `state` in place.
Matrix lstm_step(const LstmParams& params, LstmState& state, const Matrix& x, LstmTape* tape);

/// Runs the cell over `xs` starting from `state` and returns the readout
/// logits: one per step, or only the last step's when the readout is final.
std::vector<Matrix> forward_sequence(const LstmModel& model, LstmState& state,
                                     std::span<const Matrix> xs, LstmTape* tape);

/// Exact gradients of a scalar loss given d loss / d outputs for every output
/// of the recorded forward_sequence. Returns a zeros_like() container filled
/// with gradients for every tensor, trainable or not.
LstmModel backward_sequence(const LstmModel& model, const LstmTape& tape,
                            std::span<const Matrix> d_outputs);

/// Copy of `params` with one weight matrix multiplied by delta > 0.
LstmParams scale_weights(const LstmParams& params, double delta,
                         WeightMatrix which = WeightMatrix::recurrent);

}  // namespace atn
