// SPDX-License-Identifier: Apache-2.0
//
// A normalization site is one place in a cell where a preactivation gets
// normalized (the hidden-to-hidden branch, the input branch, the memory
// cell, ...). The cell's mode decides what happens there: nothing, layer
// normalization, or assorted-time normalization with its own window.

#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "atn/norm/assorted_time.hpp"
#include "atn/norm/layer_norm.hpp"

namespace atn {

enum class NormMode { plain, ln, atn };

NormMode parse_norm_mode(std::string_view text);
std::string_view to_string(NormMode mode) noexcept;

/// Forward record of one site across the steps of a sequence.
struct NormSiteTape {
  std::vector<LnCache> ln;
  AtnTape atn;
  std::size_t steps = 0;

  void clear() noexcept {
    ln.clear();
    atn.clear();
    steps = 0;
  }
  /// Per-row variance of the statistics used at step t (batch x 1).
  /// Empty for plain sites.
  Matrix variance(NormMode mode, std::size_t t) const;
};

/// Applies the site's normalization to `a`. `buffer` is only touched in atn
/// mode. Records into `tape` when non-null.
Matrix norm_site_forward(NormMode mode, AtnBuffer& buffer, const Matrix& a,
                         const NormParams& params, NormSiteTape* tape);

/// Reverse pass through one site; visit steps from last to first.
class NormSiteBackward {
 public:
  NormSiteBackward(NormMode mode, const NormSiteTape& tape, const NormParams& params,
                   bool stop_window_gradient);

  Matrix step(std::size_t t, const Matrix& dy);
  /// Accumulated gain/bias gradients (zeros for plain sites).
  NormParamGrads param_grads() const;

 private:
  NormMode mode_;
  const NormSiteTape& tape_;
  const NormParams& params_;
  std::optional<AtnBackward> atn_;
  NormParamGrads ln_grads_;
};

}  // namespace atn
