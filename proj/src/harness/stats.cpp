// SPDX-License-Identifier: Apache-2.0

#include "atn/harness/stats.hpp"

#include <fstream>

#include <json.hpp>

#include "atn/harness/training.hpp"

namespace atn {
namespace {

void record_site(StatsLog& log, const char* site, const std::vector<Matrix>& outputs,
                 const NormSiteTape& tape, NormMode mode, double epsilon) {
  for (std::size_t t = 0; t < outputs.size(); ++t) {
    const Matrix& y = outputs[t];
    const Matrix s2 = tape.variance(mode, t);
    StatsRecord r{site, t + 1, 0.0, 0.0, 0.0};
    const double width = static_cast<double>(y.cols());
    const double rows = static_cast<double>(y.rows());
    for (std::size_t b = 0; b < y.rows(); ++b) {
      double mean = 0.0;
      for (double v : y.row(b)) mean += v;
      mean /= width;
      double var = 0.0;
      for (double v : y.row(b)) var += (v - mean) * (v - mean);
      r.mean += mean / rows;
      r.var += var / width / rows;
      r.variance_ratio += s2[b] / (s2[b] + epsilon) / rows;
    }
    log.records.push_back(r);
  }
}

}  // namespace

std::vector<StatsRecord> StatsLog::site(const std::string& name) const {
  std::vector<StatsRecord> out;
  for (const auto& r : records) {
    if (r.site == name) out.push_back(r);
  }
  return out;
}

StatsLog run_stats(TrainConfig config) {
  if (config.mode == NormMode::plain) {
    throw ConfigError("mode: stats require ln or atn");
  }
  config.gamma_beta_trainable = false;
  const std::filesystem::path out_dir = config.output_dir;
  config.output_dir.clear();
  validate(config);

  LstmModel model;
  if (config.iterations > 0) {
    model = run_training(config).model;
  } else {
    TaskSource source(config);
    Rng init_rng(config.seed);
    model = LstmModel::init(model_options(config, source.meta()), init_rng);
  }
  TaskSource source(config);
  Rng data_rng(config.seed + kTrainDataSeedOffset);
  const TaskBatch batch = source.next(data_rng, config.batch, false);
  LstmState state(model.cell, batch.batch());
  LstmTape tape;
  forward_sequence(model, state, batch.inputs, &tape);

  std::vector<Matrix> hh, ih, cell;
  for (const auto& s : tape.steps) {
    hh.push_back(s.hh_norm);
    ih.push_back(s.ih_norm);
    cell.push_back(s.cell_norm);
  }
  StatsLog log;
  record_site(log, "hh", hh, tape.hh, config.mode, config.epsilon);
  record_site(log, "ih", ih, tape.ih, config.mode, config.epsilon);
  record_site(log, "cell", cell, tape.cell, config.mode, config.epsilon);

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir / "stats.json", std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + (out_dir / "stats.json").string());
    out << stats_json(log);
  }
  return log;
}

std::string stats_json(const StatsLog& log) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : log.records) {
    arr.push_back({{"site", r.site}, {"t", r.t}, {"mean", r.mean}, {"var", r.var}});
  }
  return arr.dump(1) + "\n";
}

}  // namespace atn
