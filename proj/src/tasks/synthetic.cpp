// SPDX-License-Identifier: Apache-2.0

#include "atn/tasks/synthetic.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace atn {
namespace {

TaskBatch classification_batch(std::string name, std::size_t T, std::size_t steps,
                               std::size_t batch, std::size_t input_dim,
                               std::size_t classes) {
  TaskBatch b;
  b.inputs.assign(steps, Matrix(batch, input_dim));
  b.labels.assign(steps, std::vector<int>(batch, 0));
  b.loss_mask.assign(steps, 0.0);
  b.answer_mask.assign(steps, 0.0);
  b.meta = {std::move(name), T, input_dim, classes, false, std::nullopt};
  return b;
}

void require_length(std::size_t T, std::size_t min, const char* what) {
  if (T < min) {
    throw std::invalid_argument(std::string(what) + ": T must be at least " +
                                std::to_string(min) + ", got " + std::to_string(T));
  }
}

}  // namespace

double copy_baseline(std::size_t T) {
  return static_cast<double>(kCopyDigits) * std::log(8.0) / static_cast<double>(T + 20);
}

TaskBatch gen_copy(std::size_t T, std::size_t batch, Rng& rng) {
  require_length(T, 1, "gen_copy");
  const std::size_t steps = T + 20;
  const std::size_t marker = kCopyDigits + T - 1;
  TaskBatch b = classification_batch("copy", T, steps, batch, kCopyAlphabet, kCopyClasses);
  b.meta.baseline = copy_baseline(T);
  for (std::size_t row = 0; row < batch; ++row) {
    for (std::size_t j = 0; j < kCopyDigits; ++j) {
      const int digit = 1 + static_cast<int>(rng.below(8));
      b.inputs[j](row, digit) = 1.0;
      b.labels[marker + 1 + j][row] = digit;
    }
    for (std::size_t t = kCopyDigits; t < steps; ++t) {
      b.inputs[t](row, t == marker ? kCopyMarker : 0) = 1.0;
    }
  }
  b.loss_mask.assign(steps, 1.0);
  for (std::size_t t = marker + 1; t < steps; ++t) b.answer_mask[t] = 1.0;
  return b;
}

TaskBatch gen_add(std::size_t T, std::size_t batch, Rng& rng) {
  require_length(T, 2, "gen_add");
  TaskBatch b;
  b.inputs.assign(T, Matrix(batch, 2));
  b.values.assign(T, Matrix(batch, 1));
  b.loss_mask.assign(T, 0.0);
  b.loss_mask.back() = 1.0;
  b.answer_mask = b.loss_mask;
  b.meta = {"add", T, 2, 1, true, 1.0 / 6.0};
  const std::size_t half = T / 2;
  for (std::size_t row = 0; row < batch; ++row) {
    for (std::size_t t = 0; t < T; ++t) b.inputs[t](row, 1) = rng.next_unit();
    const std::size_t first = rng.below(half);
    const std::size_t second = half + rng.below(T - half);
    b.inputs[first](row, 0) = 1.0;
    b.inputs[second](row, 0) = 1.0;
    b.values.back()(row, 0) = b.inputs[first](row, 1) + b.inputs[second](row, 1);
  }
  return b;
}

TaskBatch gen_denoise(std::size_t T, std::size_t batch, Rng& rng) {
  require_length(T, kDenoiseData + 1, "gen_denoise");
  const std::size_t slots = T - 1;
  const std::size_t steps = T + kDenoiseData;
  TaskBatch b = classification_batch("denoise", T, steps, batch, kDenoiseAlphabet, kDenoiseData);
  b.meta.baseline = std::log(static_cast<double>(kDenoiseData));
  std::vector<std::size_t> positions(slots);
  std::vector<bool> is_data(slots);
  for (std::size_t row = 0; row < batch; ++row) {
    // Partial Fisher-Yates: the first 10 entries become a uniform subset.
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    for (std::size_t j = 0; j < kDenoiseData; ++j) {
      std::swap(positions[j], positions[j + rng.below(slots - j)]);
    }
    std::fill(is_data.begin(), is_data.end(), false);
    for (std::size_t j = 0; j < kDenoiseData; ++j) is_data[positions[j]] = true;
    std::size_t emitted = 0;
    for (std::size_t t = 0; t < slots; ++t) {
      if (!is_data[t]) {
        b.inputs[t](row, kDenoiseNoise) = 1.0;
        continue;
      }
      const int symbol = static_cast<int>(rng.below(kDenoiseData));
      b.inputs[t](row, symbol) = 1.0;
      b.labels[T + emitted++][row] = symbol;
    }
    b.inputs[slots](row, kDenoiseMarker) = 1.0;
  }
  for (std::size_t t = T; t < steps; ++t) b.loss_mask[t] = b.answer_mask[t] = 1.0;
  return b;
}

}  // namespace atn
