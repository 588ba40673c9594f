// SPDX-License-Identifier: Apache-2.0

#include "atn/harness/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "atn/cells/lstm.hpp"
#include "atn/numkit/loss.hpp"

namespace atn {
namespace {

struct Fixture {
  LstmModel model;
  std::vector<Matrix> xs;
  std::vector<std::vector<int>> labels;
};

Fixture make_fixture(const GradcheckSpec& s) {
  LstmOptions o;
  o.input = s.d;
  o.hidden = s.n;
  o.output = s.classes;
  o.mode = s.mode;
  o.k = s.mode == NormMode::atn ? s.k : 1;
  o.epsilon = s.epsilon;
  o.bias_inside_norm = s.bias_inside_norm;
  o.normalize_readout = s.normalize_readout;
  o.readout_every_step = s.readout_every_step;
  o.stop_window_gradient = s.stop_window_gradient;
  Rng rng(s.seed);
  Fixture f{LstmModel::init(o, rng), {}, {}};
  LstmModel& m = f.model;
  m.cell.w_h = rng_uniform(rng, -1.0, 1.0, m.cell.w_h.rows(), m.cell.w_h.cols());
  m.cell.w_x = rng_uniform(rng, -1.0, 1.0, m.cell.w_x.rows(), m.cell.w_x.cols());
  m.cell.b = rng_uniform(rng, -0.5, 0.5, 1, m.cell.b.cols());
  m.readout.w = rng_uniform(rng, -1.0, 1.0, m.readout.w.rows(), m.readout.w.cols());
  m.readout.b = rng_uniform(rng, -0.5, 0.5, 1, m.readout.b.cols());
  for (NormParams* p : {&m.cell.norm_hh, &m.cell.norm_ih, &m.cell.norm_cell, &m.readout.norm}) {
    p->gamma = rng_uniform(rng, 0.5, 1.5, 1, p->width());
    p->beta = rng_uniform(rng, -0.3, 0.3, 1, p->width());
  }
  for (std::size_t t = 0; t < s.T; ++t) f.xs.push_back(rng_uniform(rng, -1.0, 1.0, s.batch, s.d));
  const std::size_t outputs = s.readout_every_step ? s.T : 1;
  for (std::size_t t = 0; t < outputs; ++t) {
    std::vector<int> row(s.batch);
    for (int& r : row) r = static_cast<int>(rng.below(s.classes));
    f.labels.push_back(row);
  }
  return f;
}

double loss_of(const Fixture& f, LstmTape* tape, std::vector<Matrix>* d_outputs) {
  LstmState state(f.model.cell, f.xs.front().rows());
  const auto outputs = forward_sequence(f.model, state, f.xs, tape);
  double loss = 0.0;
  for (std::size_t t = 0; t < outputs.size(); ++t) {
    LossResult r = cross_entropy_logits(outputs[t], f.labels[t]);
    loss += r.loss;
    if (d_outputs != nullptr) d_outputs->push_back(std::move(r.grad));
  }
  return loss;
}

}  // namespace

bool GradcheckReport::all_passed() const noexcept {
  return std::all_of(groups.begin(), groups.end(), [](const auto& g) { return g.passed; });
}

double GradcheckReport::worst() const noexcept {
  double w = 0.0;
  for (const auto& g : groups) w = std::max(w, g.max_rel_error);
  return w;
}

double gradcheck_relative_error(double analytic, double numeric) noexcept {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

GradcheckReport run_gradcheck(const GradcheckSpec& spec) {
  Fixture f = make_fixture(spec);
  LstmTape tape;
  std::vector<Matrix> d_outputs;
  loss_of(f, &tape, &d_outputs);
  LstmModel grads = backward_sequence(f.model, tape, d_outputs);

  GradcheckReport report;
  auto params = f.model.parameters();
  const auto analytic = grads.parameters();
  for (std::size_t g = 0; g < params.size(); ++g) {
    Matrix& p = *params[g].value;
    const Matrix& a = *analytic[g].value;
    double worst = 0.0;
    for (std::size_t e = 0; e < p.size(); ++e) {
      const double saved = p[e];
      auto at = [&](double offset) {
        p[e] = saved + offset;
        return loss_of(f, nullptr, nullptr);
      };
      const double h = spec.step;
      const double numeric =
          spec.five_point
              ? (at(-2.0 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2.0 * h)) / (12.0 * h)
              : (at(h) - at(-h)) / (2.0 * h);
      p[e] = saved;
      worst = std::max(worst, gradcheck_relative_error(a[e], numeric));
    }
    report.groups.push_back({params[g].name, worst, worst <= spec.tolerance});
  }
  return report;
}

std::string format_report(const GradcheckReport& report, double tolerance) {
  std::string out;
  char line[128];
  for (const auto& g : report.groups) {
    std::snprintf(line, sizeof line, "%-16s %.3e  %s\n", g.name.c_str(), g.max_rel_error,
                  g.passed ? "ok" : "FAIL");
    out += line;
  }
  std::snprintf(line, sizeof line, "worst %.3e vs tolerance %.1e: %s\n", report.worst(),
                tolerance, report.all_passed() ? "pass" : "fail");
  out += line;
  return out;
}

}  // namespace atn
