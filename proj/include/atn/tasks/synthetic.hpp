// SPDX-License-Identifier: Apache-2.0
//
// Generators for the copying, adding and denoise benchmarks. Each is a pure
// function of its arguments and the state of `rng`.

#pragma once

#include <cstddef>

#include "atn/numkit/rng.hpp"
#include "atn/tasks/task_batch.hpp"

namespace atn {

inline constexpr std::size_t kCopyDigits = 10;
/// Copy input alphabet: 0 (blank), digits 1-8 and the marker 9.
inline constexpr std::size_t kCopyAlphabet = 10;
inline constexpr int kCopyMarker = 9;
/// Copy outputs: blank plus the eight digits.
inline constexpr std::size_t kCopyClasses = 9;

inline constexpr std::size_t kDenoiseData = 10;
/// Data symbols 0..9, then noise, then marker.
inline constexpr int kDenoiseNoise = 10;
inline constexpr int kDenoiseMarker = 11;
inline constexpr std::size_t kDenoiseAlphabet = 12;

/// 10·ln(8)/(T+20): cross-entropy of emitting blanks until the marker and
/// guessing uniformly afterwards.
double copy_baseline(std::size_t T);

/// Steps: 10 digits drawn from 1..8, T-1 blanks, the marker, 10 blanks; the
/// last 10 targets repeat the digits and every other target is blank. Every
/// step is scored; accuracy counts the last 10 only.
TaskBatch gen_copy(std::size_t T, std::size_t batch, Rng& rng);

/// T steps of (indicator, value) with one indicator in [0, T/2) and one in
/// [T/2, T); value uniform in [0, 1). The final step is scored against the
/// sum of the two marked values.
TaskBatch gen_add(std::size_t T, std::size_t batch, Rng& rng);

/// T+10 steps: 10 data symbols at distinct uniform positions among the first
/// T-1 (in order), noise elsewhere, the marker at step T-1 (zero-based) and
/// 10 empty steps whose targets are the data symbols in order.
TaskBatch gen_denoise(std::size_t T, std::size_t batch, Rng& rng);

}  // namespace atn
