// SPDX-License-Identifier: Apache-2.0

#include "atn/harness/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "atn/optim/optimizer.hpp"
#include "atn/tasks/synthetic.hpp"

namespace atn {
namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

TaskMeta meta_for(const TrainConfig& c) {
  // A one-row batch is the cheapest way to get the generator's own metadata.
  Rng probe(0);
  switch (c.task) {
    case TaskKind::copy: return gen_copy(c.T, 1, probe).meta;
    case TaskKind::add: return gen_add(c.T, 1, probe).meta;
    case TaskKind::denoise: return gen_denoise(c.T, 1, probe).meta;
    case TaskKind::mnist_pixel:
      return {"mnist-pixel", kMnistPixels, 1, kMnistClasses, false, std::log(10.0)};
  }
  return {};
}

}  // namespace

void write_metrics_row(std::ostream& out, const MetricsRow& row) {
  out << row.iteration << ',' << format_double(row.train_loss) << ','
      << format_double(row.val_loss) << ','
      << (row.val_accuracy ? format_double(*row.val_accuracy) : std::string()) << ','
      << format_double(row.wall_time) << ',' << format_double(row.grad_norm) << '\n';
}

TaskSource::TaskSource(const TrainConfig& config) : config_(config), meta_(meta_for(config)) {
  if (config.task != TaskKind::mnist_pixel) return;
  train_set_ = std::make_shared<MnistSet>(load_mnist(config.mnist_dir / "train-images-idx3-ubyte",
                                                     config.mnist_dir / "train-labels-idx1-ubyte"));
  test_set_ = std::make_shared<MnistSet>(load_mnist(config.mnist_dir / "t10k-images-idx3-ubyte",
                                                    config.mnist_dir / "t10k-labels-idx1-ubyte"));
  train_stream_.emplace(*train_set_, config.batch, config.noise_var);
}

TaskBatch TaskSource::next(Rng& rng, std::size_t batch, bool validation) {
  switch (config_.task) {
    case TaskKind::copy: return gen_copy(config_.T, batch, rng);
    case TaskKind::add: return gen_add(config_.T, batch, rng);
    case TaskKind::denoise: return gen_denoise(config_.T, batch, rng);
    case TaskKind::mnist_pixel: {
      if (!validation) return train_stream_->next(rng);
      std::vector<std::size_t> rows(std::min(batch, test_set_->size()));
      for (auto& r : rows) r = rng.below(test_set_->size());
      return pixel_batch(*test_set_, rows, rng, config_.noise_var);
    }
  }
  throw std::logic_error("TaskSource: unknown task");
}

LstmOptions model_options(const TrainConfig& c, const TaskMeta& meta) {
  LstmOptions o;
  o.input = meta.input_dim;
  o.hidden = c.hidden;
  o.output = meta.output_dim;
  o.mode = c.mode;
  o.k = c.mode == NormMode::atn ? c.k : 1;
  o.epsilon = c.epsilon;
  o.gamma_beta_trainable = c.gamma_beta_trainable;
  o.bias_inside_norm = c.bias_inside_norm;
  o.normalize_readout = c.normalize_readout;
  o.readout_every_step = c.task == TaskKind::copy || c.task == TaskKind::denoise;
  o.stop_window_gradient = c.stop_window_gradient;
  o.forget_bias = c.forget_bias;
  return o;
}

BatchEval evaluate_batch(const LstmModel& model, const TaskBatch& batch, bool with_grads) {
  LstmState state(model.cell, batch.batch());
  LstmTape tape;
  const auto outputs = forward_sequence(model, state, batch.inputs, with_grads ? &tape : nullptr);
  BatchEval out{sequence_loss(batch, outputs), {}};
  if (with_grads && std::isfinite(out.loss.loss)) {
    out.grads = backward_sequence(model, tape, out.loss.d_outputs);
  }
  return out;
}

TrainResult run_training(const TrainConfig& config) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    if (!config.log_wall_time) return 0.0;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  TaskSource source(config);
  Rng init_rng(config.seed);
  Rng train_rng(config.seed + kTrainDataSeedOffset);
  Rng val_rng(config.seed + kValidationSeedOffset);

  TrainResult result;
  result.model = LstmModel::init(model_options(config, source.meta()), init_rng);
  LstmModel& model = result.model;

  std::ofstream csv;
  if (!config.output_dir.empty()) {
    std::filesystem::create_directories(config.output_dir);
    csv.open(config.output_dir / "metrics.csv", std::ios::binary | std::ios::trunc);
    if (!csv) throw TrainingError("cannot write " + (config.output_dir / "metrics.csv").string());
    csv << kMetricsHeader << '\n';
  }

  auto validate_now = [&](MetricsRow& row) {
    const BatchEval val = evaluate_batch(model, source.next(val_rng, config.val_batch, true), false);
    row.val_loss = val.loss.loss;
    row.val_accuracy = val.loss.accuracy;
  };

  if (config.iterations == 0) {
    MetricsRow row;
    Rng probe(config.seed + kTrainDataSeedOffset);
    row.train_loss =
        evaluate_batch(model, source.next(probe, config.batch, false), false).loss.loss;
    validate_now(row);
    row.wall_time = elapsed();
    result.final_row = row;
    return result;
  }

  OptState opt({config.optimizer, config.lr});
  double loss_sum = 0.0, norm_sum = 0.0;
  std::size_t window = 0;
  for (std::size_t it = 1; it <= config.iterations; ++it) {
    BatchEval step = evaluate_batch(model, source.next(train_rng, config.batch, false), true);
    if (!std::isfinite(step.loss.loss)) {
      throw TrainingError("iteration " + std::to_string(it) + ": training loss is " +
                          format_double(step.loss.loss));
    }
    auto params = model.parameters();
    auto grads = step.grads.parameters();
    std::vector<Matrix*> p, g;
    for (std::size_t i = 0; i < params.size(); ++i) {
      p.push_back(params[i].value);
      g.push_back(grads[i].value);
    }
    const double norm = config.clip_norm > 0.0
                            ? clip_global_norm(g, config.clip_norm)
                            : global_norm(std::vector<const Matrix*>(g.begin(), g.end()));
    if (!std::isfinite(norm)) {
      throw TrainingError("iteration " + std::to_string(it) + ": gradient norm is " +
                          format_double(norm));
    }
    optimizer_step(opt, p, std::vector<const Matrix*>(g.begin(), g.end()));
    loss_sum += step.loss.loss;
    norm_sum += norm;
    ++window;

    if (it % config.eval_every != 0 && it != config.iterations) continue;
    MetricsRow row;
    row.iteration = it;
    row.train_loss = loss_sum / static_cast<double>(window);
    row.grad_norm = norm_sum / static_cast<double>(window);
    validate_now(row);
    row.wall_time = elapsed();
    loss_sum = norm_sum = 0.0;
    window = 0;
    if (csv.is_open()) {
      write_metrics_row(csv, row);
      csv.flush();
    }
    result.rows.push_back(row);
  }
  result.final_row = result.rows.back();
  return result;
}

}  // namespace atn
