// SPDX-License-Identifier: Apache-2.0

#include "atn/cells/lstm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace atn {

namespace {

enum Gate : std::size_t { kForget = 0, kInput = 1, kOutput = 2, kCandidate = 3 };

std::size_t window_capacity(const LstmParams& p) { return p.mode == NormMode::atn ? p.k : 1; }

bool normalizes(NormMode mode) { return mode != NormMode::plain; }

}  // namespace

Matrix fan_in_uniform(Rng& rng, std::size_t rows, std::size_t cols) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
  return rng_uniform(rng, -bound, bound, rows, cols);
}

LstmModel LstmModel::init(const LstmOptions& o, Rng& rng) {
  if (o.input == 0 || o.hidden == 0 || o.output == 0) {
    throw std::invalid_argument("LstmModel::init: sizes must be positive");
  }
  if (o.k == 0) throw std::invalid_argument("LstmModel::init: k must be >= 1");
  const std::size_t n = o.hidden;
  LstmModel m;
  LstmParams& p = m.cell;
  p.w_h = fan_in_uniform(rng, 4 * n, n);
  p.w_x = fan_in_uniform(rng, 4 * n, o.input);
  p.b = Matrix(1, 4 * n);
  for (std::size_t j = 0; j < n; ++j) p.b[kForget * n + j] = o.forget_bias;
  p.norm_hh = NormParams::make(4 * n, o.epsilon, o.gamma_beta_trainable);
  p.norm_ih = NormParams::make(4 * n, o.epsilon, o.gamma_beta_trainable);
  p.norm_cell = NormParams::make(n, o.epsilon, o.gamma_beta_trainable);
  p.mode = o.mode;
  p.k = o.mode == NormMode::atn ? o.k : 1;
  p.bias_inside_norm = o.bias_inside_norm;
  p.stop_window_gradient = o.stop_window_gradient;

  m.readout.w = fan_in_uniform(rng, o.output, n);
  m.readout.b = Matrix(1, o.output);
  m.readout.normalize = o.normalize_readout;
  m.readout.norm = NormParams::make(o.output, o.epsilon, o.gamma_beta_trainable);
  m.readout.every_step = o.readout_every_step;
  return m;
}

LstmModel LstmModel::zeros_like() const {
  LstmModel z = *this;
  for (auto& np : z.parameters()) np.value->fill(0.0);
  // parameters() skips frozen norms; clear those as well.
  for (NormParams* norm : {&z.cell.norm_hh, &z.cell.norm_ih, &z.cell.norm_cell, &z.readout.norm}) {
    norm->gamma.fill(0.0);
    norm->beta.fill(0.0);
  }
  return z;
}

std::vector<NamedParam> LstmModel::parameters() {
  std::vector<NamedParam> out{{"w_h", &cell.w_h}, {"w_x", &cell.w_x}, {"b", &cell.b}};
  auto add_norm = [&](const char* name, NormParams& norm) {
    if (!norm.trainable) return;
    out.push_back({std::string(name) + ".gamma", &norm.gamma});
    out.push_back({std::string(name) + ".beta", &norm.beta});
  };
  if (normalizes(cell.mode)) {
    add_norm("norm_hh", cell.norm_hh);
    add_norm("norm_ih", cell.norm_ih);
    add_norm("norm_cell", cell.norm_cell);
  }
  out.push_back({"w_out", &readout.w});
  out.push_back({"b_out", &readout.b});
  if (readout.normalize && normalizes(cell.mode)) add_norm("norm_out", readout.norm);
  return out;
}

std::vector<NamedConstParam> LstmModel::parameters() const {
  std::vector<NamedConstParam> out;
  for (const auto& np : const_cast<LstmModel*>(this)->parameters()) {
    out.push_back({np.name, np.value});
  }
  return out;
}

LstmState::LstmState(const LstmParams& params, std::size_t batch)
    : h(batch, params.hidden()),
      c(batch, params.hidden()),
      hh(window_capacity(params)),
      ih(window_capacity(params)),
      cell(window_capacity(params)),
      out(window_capacity(params)) {}

void LstmState::reset() {
  h.fill(0.0);
  c.fill(0.0);
  hh.reset();
  ih.reset();
  cell.reset();
  out.reset();
}

void LstmTape::clear() noexcept {
  steps.clear();
  hh.clear();
  ih.clear();
  cell.clear();
  out.clear();
  readout_steps.clear();
}

Matrix lstm_step(const LstmParams& p, LstmState& state, const Matrix& x, LstmTape* tape) {
  const std::size_t n = p.hidden();
  const std::size_t batch = state.h.rows();
  if (x.cols() != p.input() || x.rows() != batch) {
    throw ShapeError("lstm_step: input " + x.shape_string() + " for batch " +
                     std::to_string(batch) + " and input size " + std::to_string(p.input()));
  }

  Matrix hh_pre = matmul_nt(state.h, p.w_h);
  Matrix ih_pre = matmul_nt(x, p.w_x);
  if (p.bias_inside_norm) add_row_inplace(ih_pre, p.b);
  Matrix hh = norm_site_forward(p.mode, state.hh, hh_pre, p.norm_hh,
                                tape != nullptr ? &tape->hh : nullptr);
  Matrix ih = norm_site_forward(p.mode, state.ih, ih_pre, p.norm_ih,
                                tape != nullptr ? &tape->ih : nullptr);

  Matrix f(batch, n), i(batch, n), o(batch, n), g(batch, n), c(batch, n);
  for (std::size_t r = 0; r < batch; ++r) {
    auto hh_row = hh.row(r);
    auto ih_row = ih.row(r);
    for (std::size_t j = 0; j < n; ++j) {
      auto gate = [&](Gate which) {
        const std::size_t col = which * n + j;
        const double bias = p.bias_inside_norm ? 0.0 : p.b[col];
        return hh_row[col] + ih_row[col] + bias;
      };
      f(r, j) = sigmoid(gate(kForget));
      i(r, j) = sigmoid(gate(kInput));
      o(r, j) = sigmoid(gate(kOutput));
      g(r, j) = std::tanh(gate(kCandidate));
      c(r, j) = f(r, j) * state.c(r, j) + i(r, j) * g(r, j);
    }
  }
  Matrix cell_norm = norm_site_forward(p.mode, state.cell, c, p.norm_cell,
                                       tape != nullptr ? &tape->cell : nullptr);
  Matrix cell_tanh = tanh(cell_norm);
  Matrix h = hadamard(o, cell_tanh);

  if (tape != nullptr) {
    tape->steps.push_back(LstmStepRecord{x, state.h, state.c, f, i, o, g, c,
                                         std::move(cell_norm), cell_tanh, std::move(hh),
                                         std::move(ih), h});
  }
  state.c = std::move(c);
  state.h = h;
  return h;
}

std::vector<Matrix> forward_sequence(const LstmModel& model, LstmState& state,
                                     std::span<const Matrix> xs, LstmTape* tape) {
  std::vector<Matrix> outputs;
  const Readout& ro = model.readout;
  const NormMode out_mode = ro.normalize ? model.cell.mode : NormMode::plain;
  const std::size_t base = tape != nullptr ? tape->steps.size() : 0;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    Matrix h = lstm_step(model.cell, state, xs[t], tape);
    if (!ro.every_step && t + 1 != xs.size()) continue;
    Matrix logits = matmul_nt(h, ro.w);
    logits = norm_site_forward(out_mode, state.out, logits, ro.norm,
                               tape != nullptr ? &tape->out : nullptr);
    add_row_inplace(logits, ro.b);
    if (tape != nullptr) tape->readout_steps.push_back(base + t);
    outputs.push_back(std::move(logits));
  }
  return outputs;
}

LstmModel backward_sequence(const LstmModel& model, const LstmTape& tape,
                            std::span<const Matrix> d_outputs) {
  const LstmParams& p = model.cell;
  const Readout& ro = model.readout;
  if (tape.steps.empty()) throw std::invalid_argument("backward_sequence: empty tape");
  if (d_outputs.size() != tape.readout_steps.size()) {
    throw std::invalid_argument("backward_sequence: " + std::to_string(d_outputs.size()) +
                                " output gradients for " +
                                std::to_string(tape.readout_steps.size()) + " recorded outputs");
  }
  const std::size_t steps = tape.steps.size();
  if (tape.hh.steps != steps || tape.ih.steps != steps || tape.cell.steps != steps) {
    throw std::invalid_argument("backward_sequence: incomplete tape");
  }

  const std::size_t n = p.hidden();
  const std::size_t batch = tape.steps.front().h.rows();
  const NormMode out_mode = ro.normalize ? p.mode : NormMode::plain;
  LstmModel grads = model.zeros_like();

  NormSiteBackward hh_back(p.mode, tape.hh, p.norm_hh, p.stop_window_gradient);
  NormSiteBackward ih_back(p.mode, tape.ih, p.norm_ih, p.stop_window_gradient);
  NormSiteBackward cell_back(p.mode, tape.cell, p.norm_cell, p.stop_window_gradient);
  NormSiteBackward out_back(out_mode, tape.out, ro.norm, p.stop_window_gradient);

  Matrix dh_next(batch, n);
  Matrix dc_next(batch, n);
  Matrix dgates(batch, 4 * n);
  std::size_t r = tape.readout_steps.size();
  for (std::size_t t = steps; t-- > 0;) {
    const LstmStepRecord& rec = tape.steps[t];
    Matrix dh = std::move(dh_next);
    if (r > 0 && tape.readout_steps[r - 1] == t) {
      --r;
      const Matrix& dlogits = d_outputs[r];
      col_sum_acc(dlogits, grads.readout.b);
      Matrix dz = out_back.step(r, dlogits);
      matmul_tn_acc(dz, rec.h, grads.readout.w);
      dh += matmul(dz, ro.w);
    }

    Matrix dcell_norm(batch, n);
    for (std::size_t e = 0; e < batch * n; ++e) {
      const double tc = rec.cell_tanh[e];
      dcell_norm[e] = dh[e] * rec.o[e] * (1.0 - tc * tc);
    }
    Matrix dc = cell_back.step(t, dcell_norm);
    dc += dc_next;

    for (std::size_t row = 0; row < batch; ++row) {
      auto dg = dgates.row(row);
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t e = row * n + j;
        const double f = rec.f[e], i = rec.i[e], o = rec.o[e], g = rec.g[e];
        dg[kForget * n + j] = dc[e] * rec.c_prev[e] * f * (1.0 - f);
        dg[kInput * n + j] = dc[e] * g * i * (1.0 - i);
        dg[kOutput * n + j] = dh[e] * rec.cell_tanh[e] * o * (1.0 - o);
        dg[kCandidate * n + j] = dc[e] * i * (1.0 - g * g);
        dc_next[e] = dc[e] * f;
      }
    }
    if (!p.bias_inside_norm) col_sum_acc(dgates, grads.cell.b);

    Matrix d_hh = hh_back.step(t, dgates);
    matmul_tn_acc(d_hh, rec.h_prev, grads.cell.w_h);
    dh_next = matmul(d_hh, p.w_h);

    Matrix d_ih = ih_back.step(t, dgates);
    if (p.bias_inside_norm) col_sum_acc(d_ih, grads.cell.b);
    matmul_tn_acc(d_ih, rec.x, grads.cell.w_x);
  }

  auto store = [](NormParams& dst, const NormParamGrads& src) {
    if (src.dgamma.empty()) return;
    dst.gamma = src.dgamma;
    dst.beta = src.dbeta;
  };
  store(grads.cell.norm_hh, hh_back.param_grads());
  store(grads.cell.norm_ih, ih_back.param_grads());
  store(grads.cell.norm_cell, cell_back.param_grads());
  store(grads.readout.norm, out_back.param_grads());
  return grads;
}

LstmParams scale_weights(const LstmParams& params, double delta, WeightMatrix which) {
  if (!(delta > 0.0)) throw std::invalid_argument("scale_weights: delta must be > 0");
  LstmParams out = params;
  (which == WeightMatrix::recurrent ? out.w_h : out.w_x) *= delta;
  return out;
}

}  // namespace atn
