// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "atn/cells/lstm.hpp"
#include "atn/harness/config.hpp"
#include "atn/tasks/mnist.hpp"

namespace atn {

/// Validation data comes from its own stream, seeded at train seed + offset.
inline constexpr std::uint64_t kValidationSeedOffset = 1000003;
/// Training batches are drawn from seed + this offset; the model init uses
/// the seed itself.
inline constexpr std::uint64_t kTrainDataSeedOffset = 7919;

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MetricsRow {
  std::size_t iteration = 0;
  /// Mean training loss over the iterations since the previous row.
  double train_loss = 0.0;
  double val_loss = 0.0;
  /// Answer-step accuracy on the validation batch (classification only).
  std::optional<double> val_accuracy;
  double wall_time = 0.0;
  /// Mean pre-clip global gradient norm since the previous row.
  double grad_norm = 0.0;
};

inline constexpr const char* kMetricsHeader =
    "iteration,train_loss,val_loss,val_accuracy,wall_time,grad_norm";

void write_metrics_row(std::ostream& out, const MetricsRow& row);

struct TrainResult {
  std::vector<MetricsRow> rows;
  /// Last row, or the initial evaluation when no iteration ran.
  MetricsRow final_row;
  LstmModel model;
};

/// Draws batches for a configured task.
class TaskSource {
 public:
  explicit TaskSource(const TrainConfig& config);
  TaskBatch next(Rng& rng, std::size_t batch, bool validation);
  const TaskMeta& meta() const noexcept { return meta_; }

 private:
  TrainConfig config_;
  TaskMeta meta_;
  std::shared_ptr<MnistSet> train_set_;
  std::shared_ptr<MnistSet> test_set_;
  std::optional<PixelStream> train_stream_;
};

/// Model options implied by the config and task.
LstmOptions model_options(const TrainConfig& config, const TaskMeta& meta);

/// Loss, gradients and accuracy of `model` on one batch. The model state is
/// fresh for every batch.
struct BatchEval {
  SequenceLoss loss;
  LstmModel grads;
};
BatchEval evaluate_batch(const LstmModel& model, const TaskBatch& batch, bool with_grads);

/// Trains per config, writing output_dir/metrics.csv when output_dir is set.
TrainResult run_training(const TrainConfig& config);

}  // namespace atn
