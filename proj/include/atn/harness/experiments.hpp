// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "atn/harness/training.hpp"

namespace atn {

struct KsweepRun {
  std::size_t k = 0;
  TrainResult result;
};

/// One ATN training run per k with the base seed; run i writes its metrics
/// under output_dir/k<k>/.
std::vector<KsweepRun> run_ksweep(const TrainConfig& base, const std::vector<std::size_t>& ks);

/// JSON dump of a batch: inputs[t][row][j], targets[t][row], loss_mask and
/// task metadata.
std::string batch_json(const TaskBatch& batch);

}  // namespace atn
