// SPDX-License-Identifier: Apache-2.0
//
// Post-normalization statistics: for each step and normalization site, the
// mean and variance of the normalized output across its width, averaged over
// the batch. Gains and biases are frozen at 1 and 0 so that the output is
// the bare normalized value.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "atn/harness/config.hpp"

namespace atn {

struct StatsRecord {
  std::string site;  ///< "hh", "ih" or "cell"
  std::size_t t = 0;  ///< 1-based step
  double mean = 0.0;
  double var = 0.0;
  /// Batch mean of s2 / (s2 + eps) for the pooled preactivation variance s2:
  /// the output variance an exact per-step normalization would have.
  double variance_ratio = 0.0;
};

struct StatsLog {
  std::vector<StatsRecord> records;

  /// Records of one site, ordered by t.
  std::vector<StatsRecord> site(const std::string& name) const;
};

/// Trains for config.iterations (usually zero), then records one forward
/// pass on a fresh training batch. Requires mode ln or atn; forces
/// gamma_beta_trainable off. Writes output_dir/stats.json when set.
StatsLog run_stats(TrainConfig config);

/// JSON array of {site, t, mean, var}.
std::string stats_json(const StatsLog& log);

}  // namespace atn
