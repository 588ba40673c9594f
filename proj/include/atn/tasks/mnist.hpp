// SPDX-License-Identifier: Apache-2.0
//
// MNIST in the IDX format and its pixel-by-pixel sequence form.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "atn/numkit/rng.hpp"
#include "atn/tasks/task_batch.hpp"

namespace atn {

inline constexpr std::uint32_t kIdxImageMagic = 2051;
inline constexpr std::uint32_t kIdxLabelMagic = 2049;
inline constexpr std::size_t kMnistPixels = 784;
inline constexpr std::size_t kMnistClasses = 10;

class IdxError : public std::runtime_error {
 public:
  enum class Kind { io, bad_magic, truncated, count_mismatch, bad_shape };
  IdxError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct MnistSet {
  Matrix images;            ///< (count x 784), values in [0, 1]
  std::vector<int> labels;  ///< 0..9

  std::size_t size() const noexcept { return labels.size(); }
};

/// Reads an image file and a label file. Pixels are scaled by 1/255.
MnistSet load_mnist(const std::filesystem::path& images_path,
                    const std::filesystem::path& labels_path);

/// Pixel sequences for the given rows of `set`: 784 steps of one input each,
/// plus Gaussian noise of variance noise_var; the label is scored at the last
/// step.
TaskBatch pixel_batch(const MnistSet& set, std::span<const std::size_t> rows, Rng& rng,
                      double noise_var);

/// Endless stream of pixel batches over shuffled epochs of `set`.
class PixelStream {
 public:
  PixelStream(const MnistSet& set, std::size_t batch, double noise_var);
  TaskBatch next(Rng& rng);

 private:
  const MnistSet* set_;
  std::size_t batch_;
  double noise_var_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

PixelStream to_pixel_sequence(const MnistSet& set, std::size_t batch, double noise_var);

}  // namespace atn
