// SPDX-License-Identifier: Apache-2.0
//
// atn: command-line entry point for training, gradient checks, statistics,
// k sweeps and task dumps.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "atn/harness/experiments.hpp"
#include "atn/harness/gradcheck.hpp"
#include "atn/harness/stats.hpp"
#include "atn/harness/training.hpp"
#include "atn/tasks/synthetic.hpp"

namespace {

using namespace atn;

struct CommonOptions {
  std::string config;
  bool quick = false;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> set;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "config file (key = value lines)");
  cmd->add_flag("--quick", o.quick, "apply the config's quick.* overrides");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--set", o.set, "override a config key, as key=value (repeatable)");
}

TrainConfig resolve(const CommonOptions& o) {
  TrainConfig c = o.config.empty() ? TrainConfig{} : load_config(o.config, o.quick);
  for (const std::string& kv : o.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) c.seed = *o.seed;
  if (!o.out.empty()) c.output_dir = o.out;
  validate(c);
  return c;
}

void print_row(const MetricsRow& row) {
  std::printf("iteration %zu  train_loss %.6f  val_loss %.6f", row.iteration, row.train_loss,
              row.val_loss);
  if (row.val_accuracy) std::printf("  val_accuracy %.4f", *row.val_accuracy);
  std::printf("  grad_norm %.4g\n", row.grad_norm);
}

std::vector<std::size_t> parse_ks(const std::string& text) {
  std::vector<std::size_t> ks;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(item, &used);
      if (used != item.size() || v == 0) throw std::invalid_argument("");
      ks.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("--ks: '" + item + "' is not a positive integer");
    }
  }
  return ks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assorted-time normalization for LSTMs: training, checks and statistics", "atn"};
  app.require_subcommand(1);

  CommonOptions train_opts;
  auto* train = app.add_subcommand("train", "train a model and write metrics.csv");
  add_common(train, train_opts);

  CommonOptions stats_opts;
  auto* stats = app.add_subcommand("stats", "write post-normalization statistics (stats.json)");
  add_common(stats, stats_opts);

  CommonOptions sweep_opts;
  std::string ks_text = "25,45,65";
  auto* ksweep = app.add_subcommand("ksweep", "one ATN training run per window length");
  add_common(ksweep, sweep_opts);
  ksweep->add_option("--ks", ks_text, "comma-separated window lengths")->capture_default_str();

  GradcheckSpec gc;
  std::string gc_mode = "atn";
  auto* gradcheck = app.add_subcommand("gradcheck", "compare analytic and numeric gradients");
  gradcheck->add_option("--mode", gc_mode, "plain, ln or atn")->capture_default_str();
  gradcheck->add_option("--k", gc.k, "ATN window")->capture_default_str();
  gradcheck->add_option("--n", gc.n, "hidden size")->capture_default_str();
  gradcheck->add_option("--d", gc.d, "input size")->capture_default_str();
  gradcheck->add_option("--T", gc.T, "sequence length")->capture_default_str();
  gradcheck->add_option("--batch", gc.batch, "batch size")->capture_default_str();
  gradcheck->add_option("--seed", gc.seed, "random seed")->capture_default_str();
  gradcheck->add_option("--epsilon", gc.epsilon, "normalization epsilon")->capture_default_str();
  gradcheck->add_option("--tolerance", gc.tolerance, "max relative error")->capture_default_str();
  gradcheck->add_option("--step", gc.step, "finite-difference step h")->capture_default_str();
  gradcheck->add_flag("--five-point", gc.five_point, "fourth-order stencil instead of central differences");
  gradcheck->add_flag("--stop-window-gradient", gc.stop_window_gradient,
                      "drop gradients through past window entries");
  gradcheck->add_flag("--bias-inside-norm", gc.bias_inside_norm, "add b before N_ih");
  gradcheck->add_flag("--normalize-readout", gc.normalize_readout, "normalize the readout");
  gradcheck->add_flag("--final-readout", [&](std::int64_t) { gc.readout_every_step = false; },
                      "read out at the last step only");

  std::string task_name = "copy";
  std::size_t task_T = 10, task_batch = 1;
  std::uint64_t task_seed = 1;
  std::string task_out;
  auto* gen = app.add_subcommand("gen-task", "dump one generated batch as JSON");
  gen->add_option("--task", task_name, "copy, add or denoise")->capture_default_str();
  gen->add_option("--T", task_T, "task length")->capture_default_str();
  gen->add_option("--batch", task_batch, "sequences")->capture_default_str();
  gen->add_option("--seed", task_seed, "random seed")->capture_default_str();
  gen->add_option("--out", task_out, "output directory for batch.json (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      const TrainConfig c = resolve(train_opts);
      const TrainResult r = run_training(c);
      for (const auto& row : r.rows) print_row(row);
      if (r.rows.empty()) print_row(r.final_row);
      return 0;
    }
    if (*stats) {
      const StatsLog log = run_stats(resolve(stats_opts));
      if (stats_opts.out.empty()) std::cout << stats_json(log);
      return 0;
    }
    if (*ksweep) {
      const auto runs = run_ksweep(resolve(sweep_opts), parse_ks(ks_text));
      for (const auto& run : runs) {
        std::printf("k=%zu  ", run.k);
        print_row(run.result.final_row);
      }
      return 0;
    }
    if (*gradcheck) {
      gc.mode = parse_norm_mode(gc_mode);
      const GradcheckReport report = run_gradcheck(gc);
      std::cout << format_report(report, gc.tolerance);
      return report.all_passed() ? 0 : 1;
    }
    if (*gen) {
      Rng rng(task_seed);
      TaskBatch batch;
      switch (parse_task_kind(task_name)) {
        case TaskKind::copy: batch = gen_copy(task_T, task_batch, rng); break;
        case TaskKind::add: batch = gen_add(task_T, task_batch, rng); break;
        case TaskKind::denoise: batch = gen_denoise(task_T, task_batch, rng); break;
        case TaskKind::mnist_pixel:
          throw ConfigError("task: gen-task supports copy, add and denoise");
      }
      const std::string json = batch_json(batch);
      if (task_out.empty()) {
        std::cout << json;
      } else {
        std::filesystem::create_directories(task_out);
        std::ofstream(std::filesystem::path(task_out) / "batch.json", std::ios::binary) << json;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "atn: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
