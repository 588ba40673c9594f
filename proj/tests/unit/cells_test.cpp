// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "atn/cells/lstm.hpp"
#include "atn/cells/rnn.hpp"
#include "finite_diff.hpp"

namespace atn {
namespace {

using testing::max_abs_diff;
using testing::max_relative_error;
using testing::numeric_gradient;
using testing::random_matrix;

std::vector<Matrix> random_sequence(Rng& rng, std::size_t steps, std::size_t batch,
                                    std::size_t d, double scale = 1.0) {
  std::vector<Matrix> xs;
  for (std::size_t t = 0; t < steps; ++t) xs.push_back(random_matrix(rng, batch, d, scale));
  return xs;
}

double weighted_sum(const std::vector<Matrix>& ys, const std::vector<Matrix>& ws) {
  double s = 0.0;
  for (std::size_t t = 0; t < ys.size(); ++t)
    for (std::size_t i = 0; i < ys[t].size(); ++i) s += ys[t][i] * ws[t][i];
  return s;
}

// O(1) weights: the normalized cell is scale-free in W, so its k-th
// derivatives grow like |W|^-k and small init weights would let O(h^2)
// truncation error of the h = 1e-5 differences approach 1e-6.
void randomize_norms(LstmModel& m, Rng& rng) {
  m.cell.w_h = random_matrix(rng, m.cell.w_h.rows(), m.cell.w_h.cols());
  m.cell.w_x = random_matrix(rng, m.cell.w_x.rows(), m.cell.w_x.cols());
  m.readout.w = random_matrix(rng, m.readout.w.rows(), m.readout.w.cols());
  for (NormParams* p : {&m.cell.norm_hh, &m.cell.norm_ih, &m.cell.norm_cell, &m.readout.norm}) {
    p->gamma = rng_uniform(rng, 0.5, 1.5, 1, p->width());
    p->beta = random_matrix(rng, 1, p->width(), 0.3);
  }
  m.cell.b = random_matrix(rng, 1, m.cell.b.cols(), 0.5);
  m.readout.b = random_matrix(rng, 1, m.readout.b.cols(), 0.5);
}

std::vector<Matrix> run(const LstmModel& m, const std::vector<Matrix>& xs, LstmTape* tape = nullptr) {
  LstmState state(m.cell, xs.front().rows());
  return forward_sequence(m, state, xs, tape);
}

// Checks every trainable tensor of `model` against central differences of
// sum(w_t * output_t) and returns the worst relative error.
double lstm_gradcheck(LstmModel model, const std::vector<Matrix>& xs, Rng& rng) {
  LstmTape tape;
  const auto outs = run(model, xs, &tape);
  std::vector<Matrix> ws;
  for (const auto& o : outs) ws.push_back(random_matrix(rng, o.rows(), o.cols()));
  LstmModel grads = backward_sequence(model, tape, ws);
  auto grad_list = grads.parameters();
  auto params = model.parameters();
  double worst = 0.0;
  for (std::size_t g = 0; g < params.size(); ++g) {
    EXPECT_EQ(params[g].name, grad_list[g].name);
    const Matrix numeric =
        numeric_gradient(*params[g].value, [&] { return weighted_sum(run(model, xs), ws); });
    const double err = max_relative_error(*grad_list[g].value, numeric);
    EXPECT_LT(err, 1e-6) << params[g].name;
    worst = std::max(worst, err);
  }
  return worst;
}

LstmOptions options(NormMode mode, std::size_t n, std::size_t d, std::size_t k,
                    std::size_t out = 3) {
  LstmOptions o;
  o.input = d;
  o.hidden = n;
  o.output = out;
  o.mode = mode;
  o.k = k;
  return o;
}

// --------------------------------------------------------------- forward

TEST(LstmStep, ZeroNetworkStaysAtZero) {
  Rng rng(1);
  LstmModel m = LstmModel::init(options(NormMode::plain, 3, 2, 1), rng);
  m.cell.w_h.fill(0.0);
  m.cell.w_x.fill(0.0);
  m.cell.b.fill(0.0);
  LstmState state(m.cell, 2);
  const Matrix h = lstm_step(m.cell, state, random_matrix(rng, 2, 2), nullptr);
  EXPECT_EQ(max_abs(h), 0.0);
  EXPECT_EQ(max_abs(state.c), 0.0);
}

TEST(LstmStep, RejectsWrongInputShape) {
  Rng rng(1);
  LstmModel m = LstmModel::init(options(NormMode::plain, 3, 2, 1), rng);
  LstmState state(m.cell, 2);
  EXPECT_THROW(lstm_step(m.cell, state, Matrix(2, 3), nullptr), ShapeError);
  EXPECT_THROW(lstm_step(m.cell, state, Matrix(1, 2), nullptr), ShapeError);
}

TEST(LstmStep, LayerNormEqualsWindowOfOne) {
  Rng rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    LstmModel ln = LstmModel::init(options(NormMode::ln, 4, 3, 1), rng);
    randomize_norms(ln, rng);
    LstmModel atn1 = ln;
    atn1.cell.mode = NormMode::atn;
    atn1.cell.k = 1;
    const auto xs = random_sequence(rng, 9, 2, 3);
    LstmTape ta, tb;
    run(ln, xs, &ta);
    run(atn1, xs, &tb);
    for (std::size_t t = 0; t < xs.size(); ++t) {
      EXPECT_LE(max_abs_diff(ta.steps[t].h, tb.steps[t].h), 1e-12);
    }
  }
}

// Straight-line transcription of the ATN-LSTM equations with explicit
// double sums over stored histories; shares no code with the library.
struct ReferenceAtnLstm {
  const LstmParams& p;
  std::vector<std::vector<double>> hh_hist, ih_hist, c_hist;

  std::vector<double> atn(std::vector<std::vector<double>>& hist, std::vector<double> a,
                          const NormParams& np) const {
    hist.push_back(a);
    const std::size_t n = a.size();
    const std::size_t kt = std::min(hist.size(), p.k);
    double mu = 0.0;
    for (std::size_t j = 0; j < kt; ++j)
      for (std::size_t s = 0; s < n; ++s) mu += hist[hist.size() - 1 - j][s];
    mu /= static_cast<double>(n * kt);
    double var = 0.0;
    for (std::size_t j = 0; j < kt; ++j)
      for (std::size_t s = 0; s < n; ++s) {
        const double d = hist[hist.size() - 1 - j][s] - mu;
        var += d * d;
      }
    var /= static_cast<double>(n * kt);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i)
      y[i] = np.gamma[i] * (a[i] - mu) / std::sqrt(var + np.epsilon) + np.beta[i];
    return y;
  }

  // One batch row.
  std::vector<double> step(std::vector<double>& h, std::vector<double>& c,
                           const std::vector<double>& x) {
    const std::size_t n = h.size();
    std::vector<double> hh(4 * n, 0.0), ih(4 * n, 0.0);
    for (std::size_t r = 0; r < 4 * n; ++r) {
      for (std::size_t j = 0; j < n; ++j) hh[r] += p.w_h(r, j) * h[j];
      for (std::size_t j = 0; j < x.size(); ++j) ih[r] += p.w_x(r, j) * x[j];
    }
    hh = atn(hh_hist, hh, p.norm_hh);
    ih = atn(ih_hist, ih, p.norm_ih);
    auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
    for (std::size_t j = 0; j < n; ++j) {
      const double f = hh[j] + ih[j] + p.b[j];
      const double i = hh[n + j] + ih[n + j] + p.b[n + j];
      const double g = hh[3 * n + j] + ih[3 * n + j] + p.b[3 * n + j];
      c[j] = sig(f) * c[j] + sig(i) * std::tanh(g);
    }
    const auto cn = atn(c_hist, c, p.norm_cell);
    for (std::size_t j = 0; j < n; ++j) {
      const double o = hh[2 * n + j] + ih[2 * n + j] + p.b[2 * n + j];
      h[j] = sig(o) * std::tanh(cn[j]);
    }
    return h;
  }
};

TEST(LstmStep, AtnMatchesStraightLineTranscription) {
  Rng rng(3);
  LstmModel m = LstmModel::init(options(NormMode::atn, 4, 2, 3), rng);
  randomize_norms(m, rng);
  const auto xs = random_sequence(rng, 8, 2, 2);
  LstmTape tape;
  run(m, xs, &tape);
  for (std::size_t b = 0; b < 2; ++b) {
    ReferenceAtnLstm ref{m.cell, {}, {}, {}};
    std::vector<double> h(4, 0.0), c(4, 0.0);
    for (std::size_t t = 0; t < xs.size(); ++t) {
      const auto x = xs[t].row(b);
      ref.step(h, c, std::vector<double>(x.begin(), x.end()));
      for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_NEAR(tape.steps[t].h(b, j), h[j], 1e-12) << "t=" << t;
        EXPECT_NEAR(tape.steps[t].c(b, j), c[j], 1e-12) << "t=" << t;
      }
    }
  }
}

TEST(ForwardSequence, SingleStepEqualsStepCall) {
  Rng rng(4);
  LstmModel m = LstmModel::init(options(NormMode::atn, 3, 2, 2), rng);
  const auto xs = random_sequence(rng, 1, 2, 2);
  const auto outs = run(m, xs);
  LstmState state(m.cell, 2);
  const Matrix h = lstm_step(m.cell, state, xs[0], nullptr);
  Matrix logits = matmul_nt(h, m.readout.w);
  add_row_inplace(logits, m.readout.b);
  ASSERT_EQ(outs.size(), 1u);
  EXPECT_EQ(outs[0], logits);
}

TEST(ForwardSequence, ResumingWithCarriedStateMatchesUnsplitRun) {
  Rng rng(5);
  for (NormMode mode : {NormMode::plain, NormMode::ln, NormMode::atn}) {
    LstmOptions o = options(mode, 4, 3, 3);
    o.normalize_readout = true;
    LstmModel m = LstmModel::init(o, rng);
    const auto xs = random_sequence(rng, 10, 2, 3);
    const auto whole = run(m, xs);
    LstmState state(m.cell, 2);
    const std::span<const Matrix> all(xs);
    auto first = forward_sequence(m, state, all.subspan(0, 4), nullptr);
    auto second = forward_sequence(m, state, all.subspan(4), nullptr);
    first.insert(first.end(), second.begin(), second.end());
    ASSERT_EQ(first.size(), whole.size());
    for (std::size_t t = 0; t < whole.size(); ++t) {
      EXPECT_LE(max_abs_diff(first[t], whole[t]), 1e-12);
    }
  }
}

TEST(ForwardSequence, OutputShapes) {
  Rng rng(6);
  LstmOptions o = options(NormMode::atn, 5, 10, 4, 9);
  LstmModel per_step = LstmModel::init(o, rng);
  const auto xs = random_sequence(rng, 30, 3, 10);
  const auto outs = run(per_step, xs);
  ASSERT_EQ(outs.size(), 30u);
  EXPECT_EQ(outs[0].rows(), 3u);
  EXPECT_EQ(outs[0].cols(), 9u);

  o.readout_every_step = false;
  o.output = 1;
  LstmModel final_only = LstmModel::init(o, rng);
  LstmTape tape;
  const auto last = run(final_only, xs, &tape);
  ASSERT_EQ(last.size(), 1u);
  EXPECT_EQ(last[0].cols(), 1u);
  EXPECT_EQ(tape.readout_steps, std::vector<std::size_t>{29});
}

// ---------------------------------------------------------------- backward

TEST(BackwardSequence, ZeroUpstreamGivesZeroGradients) {
  Rng rng(7);
  LstmModel m = LstmModel::init(options(NormMode::atn, 3, 2, 2), rng);
  const auto xs = random_sequence(rng, 5, 2, 2);
  LstmTape tape;
  const auto outs = run(m, xs, &tape);
  std::vector<Matrix> zeros;
  for (const auto& o : outs) zeros.emplace_back(o.rows(), o.cols());
  LstmModel g = backward_sequence(m, tape, zeros);
  for (const auto& p : g.parameters()) EXPECT_EQ(max_abs(*p.value), 0.0) << p.name;
}

TEST(BackwardSequence, RejectsMismatchedOrEmptyTape) {
  Rng rng(7);
  LstmModel m = LstmModel::init(options(NormMode::plain, 3, 2, 1), rng);
  LstmTape empty;
  EXPECT_THROW(backward_sequence(m, empty, {}), std::invalid_argument);
  LstmTape tape;
  run(m, random_sequence(rng, 3, 1, 2), &tape);
  std::vector<Matrix> too_few(2, Matrix(1, 3));
  EXPECT_THROW(backward_sequence(m, tape, too_few), std::invalid_argument);
}

TEST(BackwardSequence, PlainLstmMatchesFiniteDifferences) {
  Rng rng(8);
  LstmModel m = LstmModel::init(options(NormMode::plain, 3, 2, 1), rng);
  randomize_norms(m, rng);
  lstm_gradcheck(m, random_sequence(rng, 5, 2, 2), rng);
}

TEST(BackwardSequence, LnLstmMatchesFiniteDifferences) {
  Rng rng(9);
  LstmModel m = LstmModel::init(options(NormMode::ln, 4, 3, 1), rng);
  randomize_norms(m, rng);
  lstm_gradcheck(m, random_sequence(rng, 6, 2, 3), rng);
}

TEST(BackwardSequence, AtnLstmMatchesFiniteDifferences) {
  Rng rng(10);
  LstmModel m = LstmModel::init(options(NormMode::atn, 4, 2, 3), rng);
  randomize_norms(m, rng);
  lstm_gradcheck(m, random_sequence(rng, 10, 2, 2), rng);
}

TEST(BackwardSequence, VariantsMatchFiniteDifferences) {
  Rng rng(11);
  for (NormMode mode : {NormMode::ln, NormMode::atn}) {
    LstmOptions o = options(mode, 3, 2, 4);
    o.bias_inside_norm = true;
    o.normalize_readout = true;
    LstmModel m = LstmModel::init(o, rng);
    randomize_norms(m, rng);
    lstm_gradcheck(m, random_sequence(rng, 7, 2, 2), rng);

    o.bias_inside_norm = false;
    o.normalize_readout = false;
    o.readout_every_step = false;
    LstmModel last = LstmModel::init(o, rng);
    randomize_norms(last, rng);
    lstm_gradcheck(last, random_sequence(rng, 7, 2, 2), rng);
  }
}

TEST(BackwardSequence, FrozenNormsAreNotListed) {
  Rng rng(12);
  LstmOptions o = options(NormMode::atn, 3, 2, 2);
  o.gamma_beta_trainable = false;
  LstmModel m = LstmModel::init(o, rng);
  for (const auto& p : m.parameters()) EXPECT_EQ(p.name.find("norm"), std::string::npos);
  m.cell.w_h = random_matrix(rng, m.cell.w_h.rows(), m.cell.w_h.cols());
  m.cell.w_x = random_matrix(rng, m.cell.w_x.rows(), m.cell.w_x.cols());
  lstm_gradcheck(m, random_sequence(rng, 6, 2, 2), rng);
}

TEST(BackwardSequence, StopWindowGradientBreaksAgreement) {
  Rng rng(13);
  LstmOptions o = options(NormMode::atn, 4, 2, 3);
  o.stop_window_gradient = true;
  LstmModel m = LstmModel::init(o, rng);
  const auto xs = random_sequence(rng, 8, 2, 2);
  LstmTape tape;
  const auto outs = run(m, xs, &tape);
  std::vector<Matrix> ws;
  for (const auto& out : outs) ws.push_back(random_matrix(rng, out.rows(), out.cols()));
  LstmModel grads = backward_sequence(m, tape, ws);
  const Matrix numeric =
      numeric_gradient(m.cell.w_h, [&] { return weighted_sum(run(m, xs), ws); });
  EXPECT_GT(max_relative_error(grads.cell.w_h, numeric), 1e-3);
}

TEST(BackwardSequence, DeterministicTapesAndGradients) {
  auto once = [] {
    Rng rng(99);
    LstmModel m = LstmModel::init(options(NormMode::atn, 4, 2, 3), rng);
    const auto xs = random_sequence(rng, 6, 2, 2);
    LstmTape tape;
    const auto outs = run(m, xs, &tape);
    LstmModel g = backward_sequence(m, tape, outs);
    std::vector<Matrix> flat;
    for (const auto& p : g.parameters()) flat.push_back(*p.value);
    for (const auto& s : tape.steps) flat.push_back(s.h);
    return flat;
  };
  EXPECT_EQ(once(), once());
}

// ------------------------------------------------------------ invariances

TEST(ScaleWeights, Basics) {
  Rng rng(14);
  LstmModel m = LstmModel::init(options(NormMode::atn, 3, 2, 2), rng);
  const LstmParams same = scale_weights(m.cell, 1.0);
  EXPECT_EQ(same.w_h, m.cell.w_h);
  EXPECT_EQ(same.w_x, m.cell.w_x);
  EXPECT_EQ(scale_weights(m.cell, 2.0, WeightMatrix::input).w_x, scale(m.cell.w_x, 2.0));
  EXPECT_THROW(scale_weights(m.cell, 0.0), std::invalid_argument);
  EXPECT_THROW(scale_weights(m.cell, -1.0), std::invalid_argument);
}

// Runs the cell from a nonzero initial state; returns the h trajectory.
std::vector<Matrix> trajectory(const LstmParams& p, const Matrix& h0, const Matrix& c0,
                               const std::vector<Matrix>& xs) {
  LstmState state(p, h0.rows());
  state.h = h0;
  state.c = c0;
  std::vector<Matrix> hs;
  for (const auto& x : xs) hs.push_back(lstm_step(p, state, x, nullptr));
  return hs;
}

double worst_relative(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  double worst = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t)
    for (std::size_t i = 0; i < a[t].size(); ++i)
      worst = std::max(worst, std::abs(a[t][i] - b[t][i]) / std::max(std::abs(a[t][i]), 1e-12));
  return worst;
}

TEST(Invariance, AtnTrajectoryIgnoresRecurrentWeightScale) {
  Rng rng(15);
  LstmOptions o = options(NormMode::atn, 5, 3, 4);
  o.epsilon = 0.0;
  LstmModel m = LstmModel::init(o, rng);
  const Matrix h0 = random_matrix(rng, 2, 5, 0.5);
  const Matrix c0 = random_matrix(rng, 2, 5, 0.5);
  const auto xs = random_sequence(rng, 20, 2, 3);
  const auto base = trajectory(m.cell, h0, c0, xs);
  for (double delta : {0.5, 3.0}) {
    EXPECT_LT(worst_relative(base, trajectory(scale_weights(m.cell, delta), h0, c0, xs)), 1e-9);
  }
}

TEST(Invariance, RescaledEpsilonAlsoPreservesTrajectory) {
  Rng rng(16);
  LstmModel m = LstmModel::init(options(NormMode::atn, 4, 2, 3), rng);
  const auto xs = random_sequence(rng, 12, 2, 2);
  const Matrix zero(2, 4);
  const auto base = trajectory(m.cell, zero, zero, xs);
  LstmParams scaled = scale_weights(m.cell, 3.0);
  scaled.norm_hh.epsilon *= 9.0;
  EXPECT_LT(worst_relative(base, trajectory(scaled, zero, zero, xs)), 1e-9);
}

TEST(Invariance, PlainTrajectoryDependsOnWeightScale) {
  Rng rng(17);
  LstmModel m = LstmModel::init(options(NormMode::plain, 5, 3, 1), rng);
  const Matrix h0 = random_matrix(rng, 2, 5, 0.5);
  const Matrix c0 = random_matrix(rng, 2, 5, 0.5);
  const auto xs = random_sequence(rng, 20, 2, 3);
  const auto base = trajectory(m.cell, h0, c0, xs);
  EXPECT_GT(worst_relative(base, trajectory(scale_weights(m.cell, 3.0), h0, c0, xs)), 1e-2);
}

TEST(Invariance, WholeInputSequenceRescaling) {
  Rng rng(18);
  LstmOptions o = options(NormMode::atn, 4, 3, 3);
  o.epsilon = 0.0;
  LstmModel m = LstmModel::init(o, rng);
  const auto xs = random_sequence(rng, 10, 2, 3);
  std::vector<Matrix> scaled;
  for (const auto& x : xs) scaled.push_back(scale(x, 4.0));
  const Matrix h0 = random_matrix(rng, 2, 4, 0.5);
  LstmTape a, b;
  LstmState sa(m.cell, 2), sb(m.cell, 2);
  sa.h = sb.h = h0;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    lstm_step(m.cell, sa, xs[t], &a);
    lstm_step(m.cell, sb, scaled[t], &b);
  }
  std::vector<Matrix> ia, ib;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    ia.push_back(a.steps[t].ih_norm);
    ib.push_back(b.steps[t].ih_norm);
  }
  EXPECT_LT(worst_relative(ia, ib), 1e-9);
}

TEST(Invariance, SingleStepInputRescaling) {
  Rng rng(19);
  for (std::size_t k : {2u, 4u}) {
    LstmOptions o = options(NormMode::atn, 4, 3, k);
    o.epsilon = 0.0;
    LstmModel atn = LstmModel::init(o, rng);
    LstmModel ln = atn;
    ln.cell.mode = NormMode::ln;
    ln.cell.k = 1;
    auto xs = random_sequence(rng, 6, 2, 3);
    auto ih_at = [](const LstmModel& m, const std::vector<Matrix>& seq) {
      LstmTape tape;
      LstmState state(m.cell, 2);
      forward_sequence(m, state, seq, &tape);
      return tape.steps.back().ih_norm;
    };
    const Matrix atn_before = ih_at(atn, xs);
    const Matrix ln_before = ih_at(ln, xs);
    xs.back() = scale(xs.back(), 2.0);
    EXPECT_GT(std::sqrt(sum_squares(sub(atn_before, ih_at(atn, xs)))), 1e-3);
    EXPECT_LE(max_abs_diff(ln_before, ih_at(ln, xs)), 1e-10);
  }
}

// --------------------------------------------------------------------- RNN

TEST(Rnn, ZeroWeightsKeepHiddenAtZero) {
  Rng rng(20);
  RnnParams p = RnnParams::init(2, 3, 2, NormMode::plain, 1, rng);
  p.w_h.fill(0.0);
  p.w_x.fill(0.0);
  RnnState state(p, 2);
  for (const auto& x : random_sequence(rng, 5, 2, 2)) {
    EXPECT_EQ(max_abs(rnn_step(p, state, x, nullptr).h), 0.0);
  }
}

TEST(Rnn, LnInputBranchIgnoresInputScale) {
  Rng rng(21);
  RnnParams p = RnnParams::init(3, 4, 2, NormMode::ln, 1, rng, 0.0);
  const Matrix x = random_matrix(rng, 1, 3);
  const Matrix a = ln_forward(matmul_nt(x, p.w_x), p.norm_ih).y;
  const Matrix b = ln_forward(matmul_nt(scale(x, 5.0), p.w_x), p.norm_ih).y;
  EXPECT_LT(max_abs_diff(a, b), 1e-9);

  // Through the cell as well: with a zero initial state the first output
  // only sees x through the normalized input branch.
  RnnState s1(p, 1), s2(p, 1);
  EXPECT_LT(max_abs_diff(rnn_step(p, s1, x, nullptr).y, rnn_step(p, s2, scale(x, 5.0), nullptr).y),
            1e-9);
}

TEST(Rnn, AtnOutputDependsOnSingleStepScale) {
  Rng rng(22);
  RnnParams p = RnnParams::init(3, 4, 2, NormMode::atn, 2, rng);
  auto xs = random_sequence(rng, 4, 1, 3);
  RnnState s1(p, 1);
  const Matrix before = rnn_forward_sequence(p, s1, xs, nullptr).back();
  xs.back() = scale(xs.back(), 5.0);
  RnnState s2(p, 1);
  const Matrix after = rnn_forward_sequence(p, s2, xs, nullptr).back();
  EXPECT_GT(max_abs_diff(before, after), 1e-3);
}

TEST(Rnn, BackwardMatchesFiniteDifferences) {
  Rng rng(23);
  for (NormMode mode : {NormMode::plain, NormMode::ln, NormMode::atn}) {
    RnnParams p = RnnParams::init(2, 4, 3, mode, 3, rng);
    p.beta_h = random_matrix(rng, 1, 4, 0.5);
    const auto xs = random_sequence(rng, 7, 2, 2);
    auto run_rnn = [&](RnnTape* tape) {
      RnnState state(p, 2);
      return rnn_forward_sequence(p, state, xs, tape);
    };
    RnnTape tape;
    const auto ys = run_rnn(&tape);
    std::vector<Matrix> ws;
    for (const auto& y : ys) ws.push_back(random_matrix(rng, y.rows(), y.cols()));
    RnnParams grads = rnn_backward_sequence(p, tape, ws);
    auto params = p.parameters();
    auto glist = grads.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
      const Matrix numeric = numeric_gradient(
          *params[i].value, [&] { return weighted_sum(run_rnn(nullptr), ws); });
      EXPECT_LT(max_relative_error(*glist[i].value, numeric), 1e-6)
          << to_string(mode) << " " << params[i].name;
    }
  }
}

}  // namespace
}  // namespace atn
