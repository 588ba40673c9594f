// SPDX-License-Identifier: Apache-2.0

#include "atn/cells/rnn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace atn {

RnnParams RnnParams::init(std::size_t input, std::size_t hidden, std::size_t output,
                          NormMode mode, std::size_t k, Rng& rng, double epsilon) {
  if (input == 0 || hidden == 0 || output == 0 || k == 0) {
    throw std::invalid_argument("RnnParams::init: sizes and k must be positive");
  }
  RnnParams p;
  p.w_h = fan_in_uniform(rng, hidden, hidden);
  p.w_x = fan_in_uniform(rng, hidden, input);
  p.beta_h = Matrix(1, hidden);
  p.w_y = fan_in_uniform(rng, output, hidden);
  p.beta_y = Matrix(1, output);
  p.norm_hh = NormParams::make(hidden, epsilon);
  p.norm_ih = NormParams::make(hidden, epsilon);
  p.norm_y = NormParams::make(output, epsilon);
  p.mode = mode;
  p.k = mode == NormMode::atn ? k : 1;
  return p;
}

RnnParams RnnParams::zeros_like() const {
  RnnParams z = *this;
  for (Matrix* m : {&z.w_h, &z.w_x, &z.beta_h, &z.w_y, &z.beta_y, &z.norm_hh.gamma,
                    &z.norm_hh.beta, &z.norm_ih.gamma, &z.norm_ih.beta, &z.norm_y.gamma,
                    &z.norm_y.beta}) {
    m->fill(0.0);
  }
  return z;
}

std::vector<NamedParam> RnnParams::parameters() {
  std::vector<NamedParam> out{{"w_h", &w_h}, {"w_x", &w_x}, {"beta_h", &beta_h},
                              {"w_y", &w_y}, {"beta_y", &beta_y}};
  if (mode != NormMode::plain) {
    for (auto [name, norm] : {std::pair{"norm_hh", &norm_hh}, std::pair{"norm_ih", &norm_ih},
                              std::pair{"norm_y", &norm_y}}) {
      if (!norm->trainable) continue;
      out.push_back({std::string(name) + ".gamma", &norm->gamma});
      out.push_back({std::string(name) + ".beta", &norm->beta});
    }
  }
  return out;
}

RnnState::RnnState(const RnnParams& params, std::size_t batch)
    : h(batch, params.hidden()), hh(params.k), ih(params.k), y(params.k) {}

void RnnState::reset() {
  h.fill(0.0);
  hh.reset();
  ih.reset();
  y.reset();
}

RnnStepOutput rnn_step(const RnnParams& p, RnnState& state, const Matrix& x, RnnTape* tape) {
  if (x.cols() != p.input() || x.rows() != state.h.rows()) {
    throw ShapeError("rnn_step: input " + x.shape_string() + " for batch " +
                     std::to_string(state.h.rows()) + " and input size " +
                     std::to_string(p.input()));
  }
  Matrix s = norm_site_forward(p.mode, state.hh, matmul_nt(state.h, p.w_h), p.norm_hh,
                               tape != nullptr ? &tape->hh : nullptr);
  s += norm_site_forward(p.mode, state.ih, matmul_nt(x, p.w_x), p.norm_ih,
                         tape != nullptr ? &tape->ih : nullptr);
  add_row_inplace(s, p.beta_h);
  Matrix h = tanh(s);
  Matrix y = norm_site_forward(p.mode, state.y, matmul_nt(h, p.w_y), p.norm_y,
                               tape != nullptr ? &tape->y : nullptr);
  add_row_inplace(y, p.beta_y);
  if (tape != nullptr) tape->steps.push_back({x, state.h, h});
  state.h = h;
  return {std::move(h), std::move(y)};
}

std::vector<Matrix> rnn_forward_sequence(const RnnParams& params, RnnState& state,
                                         std::span<const Matrix> xs, RnnTape* tape) {
  std::vector<Matrix> ys;
  ys.reserve(xs.size());
  for (const Matrix& x : xs) ys.push_back(rnn_step(params, state, x, tape).y);
  return ys;
}

RnnParams rnn_backward_sequence(const RnnParams& p, const RnnTape& tape,
                                std::span<const Matrix> d_outputs) {
  if (d_outputs.size() != tape.steps.size() || tape.steps.empty()) {
    throw std::invalid_argument("rnn_backward_sequence: " + std::to_string(d_outputs.size()) +
                                " output gradients for " + std::to_string(tape.steps.size()) +
                                " recorded steps");
  }
  RnnParams grads = p.zeros_like();
  NormSiteBackward hh_back(p.mode, tape.hh, p.norm_hh, p.stop_window_gradient);
  NormSiteBackward ih_back(p.mode, tape.ih, p.norm_ih, p.stop_window_gradient);
  NormSiteBackward y_back(p.mode, tape.y, p.norm_y, p.stop_window_gradient);

  const std::size_t batch = tape.steps.front().h.rows();
  Matrix dh_next(batch, p.hidden());
  for (std::size_t t = tape.steps.size(); t-- > 0;) {
    const RnnStepRecord& rec = tape.steps[t];
    col_sum_acc(d_outputs[t], grads.beta_y);
    Matrix dz = y_back.step(t, d_outputs[t]);
    matmul_tn_acc(dz, rec.h, grads.w_y);
    Matrix ds = matmul(dz, p.w_y);
    ds += dh_next;
    for (std::size_t e = 0; e < ds.size(); ++e) ds[e] *= 1.0 - rec.h[e] * rec.h[e];
    col_sum_acc(ds, grads.beta_h);

    Matrix d_hh = hh_back.step(t, ds);
    matmul_tn_acc(d_hh, rec.h_prev, grads.w_h);
    dh_next = matmul(d_hh, p.w_h);
    Matrix d_ih = ih_back.step(t, ds);
    matmul_tn_acc(d_ih, rec.x, grads.w_x);
  }
  if (p.mode != NormMode::plain) {
    auto store = [](NormParams& dst, const NormParamGrads& src) {
      dst.gamma = src.dgamma;
      dst.beta = src.dbeta;
    };
    store(grads.norm_hh, hh_back.param_grads());
    store(grads.norm_ih, ih_back.param_grads());
    store(grads.norm_y, y_back.param_grads());
  }
  return grads;
}

RnnParams scale_weights(const RnnParams& params, double delta, WeightMatrix which) {
  if (!(delta > 0.0)) throw std::invalid_argument("scale_weights: delta must be > 0");
  RnnParams out = params;
  (which == WeightMatrix::recurrent ? out.w_h : out.w_x) *= delta;
  return out;
}

}  // namespace atn
