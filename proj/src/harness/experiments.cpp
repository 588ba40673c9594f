// SPDX-License-Identifier: Apache-2.0

#include "atn/harness/experiments.hpp"

#include <json.hpp>

namespace atn {

std::vector<KsweepRun> run_ksweep(const TrainConfig& base, const std::vector<std::size_t>& ks) {
  if (base.mode != NormMode::atn) throw ConfigError("mode: ksweep requires atn");
  if (ks.empty()) throw ConfigError("k: the k list is empty");
  for (std::size_t k : ks) {
    TrainConfig c = base;
    c.k = k;
    validate(c);
  }
  std::vector<KsweepRun> runs;
  for (std::size_t k : ks) {
    TrainConfig c = base;
    c.k = k;
    if (!base.output_dir.empty()) c.output_dir = base.output_dir / ("k" + std::to_string(k));
    runs.push_back({k, run_training(c)});
  }
  return runs;
}

std::string batch_json(const TaskBatch& batch) {
  using nlohmann::ordered_json;
  ordered_json inputs = ordered_json::array();
  for (const Matrix& step : batch.inputs) {
    ordered_json rows = ordered_json::array();
    for (std::size_t r = 0; r < step.rows(); ++r) {
      const auto row = step.row(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    inputs.push_back(std::move(rows));
  }
  ordered_json targets = ordered_json::array();
  if (batch.meta.regression) {
    for (const Matrix& step : batch.values) {
      targets.push_back(std::vector<double>(step.values().begin(), step.values().end()));
    }
  } else {
    for (const auto& step : batch.labels) targets.push_back(step);
  }
  ordered_json out = {
      {"task", batch.meta.name},
      {"T", batch.meta.T},
      {"steps", batch.steps()},
      {"batch", batch.batch()},
      {"input_dim", batch.meta.input_dim},
      {"output_dim", batch.meta.output_dim},
      {"regression", batch.meta.regression},
      {"baseline", batch.meta.baseline ? ordered_json(*batch.meta.baseline) : ordered_json()},
      {"loss_mask", batch.loss_mask},
      {"answer_mask", batch.answer_mask},
      {"inputs", std::move(inputs)},
      {"targets", std::move(targets)},
  };
  return out.dump() + "\n";
}

}  // namespace atn
