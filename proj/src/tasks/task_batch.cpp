// SPDX-License-Identifier: Apache-2.0

#include "atn/tasks/task_batch.hpp"

#include <algorithm>
#include <stdexcept>

#include "atn/numkit/loss.hpp"

namespace atn {

TaskKind parse_task_kind(std::string_view name) {
  if (name == "copy") return TaskKind::copy;
  if (name == "add") return TaskKind::add;
  if (name == "denoise") return TaskKind::denoise;
  if (name == "mnist-pixel") return TaskKind::mnist_pixel;
  throw std::invalid_argument("unknown task '" + std::string(name) +
                              "' (expected copy, add, denoise or mnist-pixel)");
}

std::string_view to_string(TaskKind kind) noexcept {
  switch (kind) {
    case TaskKind::copy: return "copy";
    case TaskKind::add: return "add";
    case TaskKind::denoise: return "denoise";
    case TaskKind::mnist_pixel: return "mnist-pixel";
  }
  return "?";
}

SequenceLoss sequence_loss(const TaskBatch& batch, std::span<const Matrix> outputs) {
  const std::size_t steps = batch.steps();
  if (steps == 0) throw std::invalid_argument("sequence_loss: empty batch");
  const bool final_only = outputs.size() == 1 && steps > 1;
  if (!final_only && outputs.size() != steps) {
    throw std::invalid_argument("sequence_loss: " + std::to_string(outputs.size()) +
                                " outputs for " + std::to_string(steps) + " steps");
  }
  const std::size_t first = final_only ? steps - 1 : 0;
  double weight = 0.0;
  for (std::size_t t = 0; t < steps; ++t) {
    if (t < first && batch.loss_mask[t] != 0.0) {
      throw std::invalid_argument("sequence_loss: step " + std::to_string(t) +
                                  " is scored but only the final output was given");
    }
    weight += batch.loss_mask[t];
  }
  if (weight == 0.0) throw std::invalid_argument("sequence_loss: loss mask is empty");

  SequenceLoss out;
  std::size_t correct = 0, answered = 0;
  for (std::size_t t = first; t < steps; ++t) {
    const Matrix& y = outputs[t - first];
    const double m = batch.loss_mask[t];
    if (batch.meta.regression) {
      LossResult r = mse(y, batch.values[t]);
      out.loss += m * r.loss;
      out.d_outputs.push_back(std::move(r.grad *= m / weight));
      continue;
    }
    LossResult r = cross_entropy_logits(y, batch.labels[t]);
    out.loss += m * r.loss;
    out.d_outputs.push_back(std::move(r.grad *= m / weight));
    if (batch.answer_mask[t] == 0.0) continue;
    for (std::size_t row = 0; row < y.rows(); ++row) {
      const auto logits = y.row(row);
      const auto best = std::max_element(logits.begin(), logits.end()) - logits.begin();
      correct += best == batch.labels[t][row];
      ++answered;
    }
  }
  out.loss /= weight;
  if (!batch.meta.regression && answered > 0) {
    out.accuracy = static_cast<double>(correct) / static_cast<double>(answered);
  }
  return out;
}

}  // namespace atn
