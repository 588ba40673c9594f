// SPDX-License-Identifier: Apache-2.0

#include "atn/tasks/mnist.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>

namespace atn {
namespace {

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxError(IdxError::Kind::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& bytes, std::size_t offset,
                        const std::filesystem::path& path) {
  if (bytes.size() < offset + 4) {
    throw IdxError(IdxError::Kind::truncated, path.string() + ": truncated header");
  }
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void check_magic(std::uint32_t got, std::uint32_t want, const std::filesystem::path& path) {
  if (got != want) {
    throw IdxError(IdxError::Kind::bad_magic, path.string() + ": magic " + std::to_string(got) +
                                                  ", expected " + std::to_string(want));
  }
}

void check_payload(const std::vector<unsigned char>& bytes, std::size_t header,
                   std::size_t payload, const std::filesystem::path& path) {
  if (bytes.size() < header + payload) {
    throw IdxError(IdxError::Kind::truncated,
                   path.string() + ": expected " + std::to_string(payload) +
                       " payload bytes, found " + std::to_string(bytes.size() - header));
  }
}

}  // namespace

MnistSet load_mnist(const std::filesystem::path& images_path,
                    const std::filesystem::path& labels_path) {
  const auto img = read_file(images_path);
  check_magic(read_be32(img, 0, images_path), kIdxImageMagic, images_path);
  const std::size_t count = read_be32(img, 4, images_path);
  const std::size_t rows = read_be32(img, 8, images_path);
  const std::size_t cols = read_be32(img, 12, images_path);
  if (rows * cols != kMnistPixels) {
    throw IdxError(IdxError::Kind::bad_shape, images_path.string() + ": images are " +
                                                  std::to_string(rows) + "x" +
                                                  std::to_string(cols) + ", expected 28x28");
  }
  check_payload(img, 16, count * kMnistPixels, images_path);

  const auto lab = read_file(labels_path);
  check_magic(read_be32(lab, 0, labels_path), kIdxLabelMagic, labels_path);
  const std::size_t label_count = read_be32(lab, 4, labels_path);
  if (label_count != count) {
    throw IdxError(IdxError::Kind::count_mismatch,
                   std::to_string(count) + " images but " + std::to_string(label_count) +
                       " labels");
  }
  check_payload(lab, 8, count, labels_path);

  MnistSet set{Matrix(count, kMnistPixels), std::vector<int>(count)};
  for (std::size_t i = 0; i < count * kMnistPixels; ++i) set.images[i] = img[16 + i] / 255.0;
  for (std::size_t i = 0; i < count; ++i) {
    set.labels[i] = lab[8 + i];
    if (set.labels[i] >= static_cast<int>(kMnistClasses)) {
      throw IdxError(IdxError::Kind::bad_shape,
                     labels_path.string() + ": label " + std::to_string(set.labels[i]) +
                         " at index " + std::to_string(i));
    }
  }
  return set;
}

TaskBatch pixel_batch(const MnistSet& set, std::span<const std::size_t> rows, Rng& rng,
                      double noise_var) {
  if (noise_var < 0.0) throw std::invalid_argument("pixel_batch: noise_var must be >= 0");
  const std::size_t batch = rows.size();
  TaskBatch b;
  b.inputs.assign(kMnistPixels, Matrix(batch, 1));
  b.labels.assign(kMnistPixels, std::vector<int>(batch, 0));
  b.loss_mask.assign(kMnistPixels, 0.0);
  b.loss_mask.back() = 1.0;
  b.answer_mask = b.loss_mask;
  b.meta = {"mnist-pixel", kMnistPixels, 1, kMnistClasses, false, std::log(10.0)};
  const double sd = std::sqrt(noise_var);
  for (std::size_t r = 0; r < batch; ++r) {
    const auto pixels = set.images.row(rows[r]);
    for (std::size_t t = 0; t < kMnistPixels; ++t) {
      b.inputs[t](r, 0) = pixels[t] + (sd > 0.0 ? sd * rng.standard_normal() : 0.0);
    }
    b.labels.back()[r] = set.labels[rows[r]];
  }
  return b;
}

PixelStream::PixelStream(const MnistSet& set, std::size_t batch, double noise_var)
    : set_(&set), batch_(batch), noise_var_(noise_var), order_(set.size()) {
  if (batch == 0 || batch > set.size()) {
    throw std::invalid_argument("PixelStream: batch must be in [1, set size]");
  }
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  cursor_ = order_.size();
}

TaskBatch PixelStream::next(Rng& rng) {
  if (cursor_ + batch_ > order_.size()) {
    for (std::size_t i = order_.size(); i > 1; --i) std::swap(order_[i - 1], order_[rng.below(i)]);
    cursor_ = 0;
  }
  const std::span<const std::size_t> rows(order_.data() + cursor_, batch_);
  cursor_ += batch_;
  return pixel_batch(*set_, rows, rng, noise_var_);
}

PixelStream to_pixel_sequence(const MnistSet& set, std::size_t batch, double noise_var) {
  return PixelStream(set, batch, noise_var);
}

}  // namespace atn
