// SPDX-License-Identifier: Apache-2.0
//
// A batch of sequences for one task, stored time-major: inputs[t] holds the
// (batch x d) inputs of step t for every sequence in the batch.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "atn/numkit/matrix.hpp"

namespace atn {

enum class TaskKind { copy, add, denoise, mnist_pixel };

TaskKind parse_task_kind(std::string_view name);
std::string_view to_string(TaskKind kind) noexcept;

struct TaskMeta {
  std::string name;
  /// The task's length parameter (not the number of steps, which is larger
  /// for copy and denoise).
  std::size_t T = 0;
  std::size_t input_dim = 0;
  /// Classes for classification tasks, 1 for regression.
  std::size_t output_dim = 0;
  bool regression = false;
  /// Loss of the best memory-free predictor, where the task has one.
  std::optional<double> baseline;
};

struct TaskBatch {
  std::vector<Matrix> inputs;
  /// Classification targets: labels[t][row]. Empty for regression.
  std::vector<std::vector<int>> labels;
  /// Regression targets: values[t] is (batch x 1). Empty for classification.
  std::vector<Matrix> values;
  /// Weight of each step in the loss, 0 or 1.
  std::vector<double> loss_mask;
  /// Steps that count towards accuracy.
  std::vector<double> answer_mask;
  TaskMeta meta;

  std::size_t steps() const noexcept { return inputs.size(); }
  std::size_t batch() const noexcept { return inputs.empty() ? 0 : inputs.front().rows(); }
};

struct SequenceLoss {
  /// Mask-weighted mean of the per-step losses.
  double loss = 0.0;
  /// d loss / d output, aligned with the outputs passed in.
  std::vector<Matrix> d_outputs;
  /// Argmax accuracy over the answer steps; empty for regression.
  std::optional<double> accuracy;
};

/// Scores model outputs against the batch. `outputs` holds one matrix per
/// step, or a single matrix for the final step, in which case the loss mask
/// must not select any earlier step. Cross-entropy on logits for
/// classification, mean squared error for regression.
SequenceLoss sequence_loss(const TaskBatch& batch, std::span<const Matrix> outputs);

}  // namespace atn
