// SPDX-License-Identifier: Apache-2.0
//
// Elman RNN with normalized branches:
//
//   h(t) = tanh(N_hh(W_h h(t-1)) + N_ih(W_x x(t)) + beta_h)
//   y(t) = N_y(W_y h(t)) + beta_y
//
// In plain mode every N is the identity, which gives the textbook cell.

#pragma once

#include <span>
#include <vector>

#include "atn/cells/norm_site.hpp"
#include "atn/cells/params.hpp"

namespace atn {

struct RnnParams {
  Matrix w_h;     ///< (n x n)
  Matrix w_x;     ///< (n x d)
  Matrix beta_h;  ///< (1 x n)
  Matrix w_y;     ///< (out x n)
  Matrix beta_y;  ///< (1 x out)
  NormParams norm_hh;
  NormParams norm_ih;
  NormParams norm_y;
  NormMode mode = NormMode::plain;
  std::size_t k = 1;
  bool stop_window_gradient = false;

  static RnnParams init(std::size_t input, std::size_t hidden, std::size_t output, NormMode mode,
                        std::size_t k, Rng& rng, double epsilon = kDefaultNormEpsilon);
  RnnParams zeros_like() const;
  std::vector<NamedParam> parameters();

  std::size_t hidden() const noexcept { return w_h.cols(); }
  std::size_t input() const noexcept { return w_x.cols(); }
};

struct RnnState {
  Matrix h;
  AtnBuffer hh;
  AtnBuffer ih;
  AtnBuffer y;

  RnnState(const RnnParams& params, std::size_t batch);
  void reset();
};

struct RnnStepRecord {
  Matrix x;
  Matrix h_prev;
  Matrix h;
};

struct RnnTape {
  std::vector<RnnStepRecord> steps;
  NormSiteTape hh;
  NormSiteTape ih;
  NormSiteTape y;
};

struct RnnStepOutput {
  Matrix h;
  Matrix y;
};

RnnStepOutput rnn_step(const RnnParams& params, RnnState& state, const Matrix& x, RnnTape* tape);

/// Outputs y(t) for every step.
std::vector<Matrix> rnn_forward_sequence(const RnnParams& params, RnnState& state,
                                         std::span<const Matrix> xs, RnnTape* tape);

/// Gradients for every tensor given d loss / d y(t) for every recorded step.
RnnParams rnn_backward_sequence(const RnnParams& params, const RnnTape& tape,
                                std::span<const Matrix> d_outputs);

RnnParams scale_weights(const RnnParams& params, double delta,
                        WeightMatrix which = WeightMatrix::recurrent);

}  // namespace atn
