// SPDX-License-Identifier: Apache-2.0
//
// Compares backward_sequence against central finite differences of a
// cross-entropy loss on one fixed random batch.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "atn/cells/norm_site.hpp"

namespace atn {

struct GradcheckSpec {
  NormMode mode = NormMode::atn;
  std::size_t n = 4;  ///< hidden size
  std::size_t d = 3;  ///< input size
  std::size_t k = 3;
  std::size_t T = 10;
  std::size_t batch = 2;
  std::size_t classes = 3;
  std::uint64_t seed = 1;
  double epsilon = 1e-5;
  bool stop_window_gradient = false;
  bool bias_inside_norm = false;
  bool normalize_readout = false;
  bool readout_every_step = true;
  double step = 1e-5;
  double tolerance = 1e-6;
  /// Use (f(-2h) - 8 f(-h) + 8 f(h) - f(2h)) / 12h instead of the central
  /// difference. With step ~1e-3 its roundoff floor is about 100x lower,
  /// which resolves gradient entries far below 1e-4.
  bool five_point = false;
};

struct GroupError {
  std::string name;
  double max_rel_error = 0.0;
  bool passed = false;
};

struct GradcheckReport {
  std::vector<GroupError> groups;
  bool all_passed() const noexcept;
  double worst() const noexcept;
};

/// |a - n| / max(|a|, |n|, 1e-8)
double gradcheck_relative_error(double analytic, double numeric) noexcept;

/// Weights are drawn from U(-1, 1) rather than the training initialization:
/// the normalized cell is invariant to the scale of W, so small weights
/// inflate its curvature and with it the O(h^2) truncation error.
GradcheckReport run_gradcheck(const GradcheckSpec& spec);

std::string format_report(const GradcheckReport& report, double tolerance);

}  // namespace atn
