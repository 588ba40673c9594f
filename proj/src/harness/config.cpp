// SPDX-License-Identifier: Apache-2.0

#include "atn/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <utility>

namespace atn {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
  throw ConfigError(std::string(key) + ": cannot parse '" + std::string(value) + "' as " +
                    expected);
}

template <typename T>
T parse_unsigned(std::string_view key, std::string_view value) {
  T out{};
  const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || end != value.data() + value.size()) {
    bad_value(key, value, "a non-negative integer");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || end != value.data() + value.size() || !std::isfinite(out)) {
    bad_value(key, value, "a finite number");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value, "a boolean");
}

template <typename F>
auto parse_enum(std::string_view key, std::string_view value, F parse) {
  try {
    return parse(value);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Field {
  std::function<void(TrainConfig&, std::string_view, std::string_view)> set;
  std::function<std::string(const TrainConfig&)> get;
};

template <typename T>
Field size_field(T TrainConfig::*member) {
  return {[member](TrainConfig& c, std::string_view k, std::string_view v) {
            c.*member = parse_unsigned<T>(k, v);
          },
          [member](const TrainConfig& c) { return std::to_string(c.*member); }};
}

Field double_field(double TrainConfig::*member) {
  return {[member](TrainConfig& c, std::string_view k, std::string_view v) {
            c.*member = parse_double(k, v);
          },
          [member](const TrainConfig& c) { return format_double(c.*member); }};
}

Field bool_field(bool TrainConfig::*member) {
  return {[member](TrainConfig& c, std::string_view k, std::string_view v) {
            c.*member = parse_bool(k, v);
          },
          [member](const TrainConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

Field path_field(std::filesystem::path TrainConfig::*member) {
  return {[member](TrainConfig& c, std::string_view, std::string_view v) { c.*member = v; },
          [member](const TrainConfig& c) { return (c.*member).string(); }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"task",
       {[](TrainConfig& c, std::string_view k, std::string_view v) {
          c.task = parse_enum(k, v, parse_task_kind);
        },
        [](const TrainConfig& c) { return std::string(to_string(c.task)); }}},
      {"T", size_field(&TrainConfig::T)},
      {"mode",
       {[](TrainConfig& c, std::string_view k, std::string_view v) {
          c.mode = parse_enum(k, v, parse_norm_mode);
        },
        [](const TrainConfig& c) { return std::string(to_string(c.mode)); }}},
      {"k", size_field(&TrainConfig::k)},
      {"hidden", size_field(&TrainConfig::hidden)},
      {"batch", size_field(&TrainConfig::batch)},
      {"optimizer",
       {[](TrainConfig& c, std::string_view k, std::string_view v) {
          c.optimizer = parse_enum(k, v, parse_optimizer_kind);
        },
        [](const TrainConfig& c) { return std::string(to_string(c.optimizer)); }}},
      {"lr", double_field(&TrainConfig::lr)},
      {"clip_norm", double_field(&TrainConfig::clip_norm)},
      {"epsilon", double_field(&TrainConfig::epsilon)},
      {"gamma_beta_trainable", bool_field(&TrainConfig::gamma_beta_trainable)},
      {"bias_inside_norm", bool_field(&TrainConfig::bias_inside_norm)},
      {"normalize_readout", bool_field(&TrainConfig::normalize_readout)},
      {"stop_window_gradient", bool_field(&TrainConfig::stop_window_gradient)},
      {"forget_bias", double_field(&TrainConfig::forget_bias)},
      {"seed", size_field(&TrainConfig::seed)},
      {"iterations", size_field(&TrainConfig::iterations)},
      {"eval_every", size_field(&TrainConfig::eval_every)},
      {"val_batch", size_field(&TrainConfig::val_batch)},
      {"noise_var", double_field(&TrainConfig::noise_var)},
      {"mnist_dir", path_field(&TrainConfig::mnist_dir)},
      {"output_dir", path_field(&TrainConfig::output_dir)},
      {"log_wall_time", bool_field(&TrainConfig::log_wall_time)},
  };
  return table;
}

const Field* find_field(std::string_view key) {
  for (const auto& [name, field] : fields()) {
    if (name == key) return &field;
  }
  return nullptr;
}

void require(bool ok, const char* field, const std::string& message) {
  if (!ok) throw ConfigError(std::string(field) + ": " + message);
}

}  // namespace

void set_config_value(TrainConfig& config, std::string_view key, std::string_view value) {
  const Field* field = find_field(key);
  if (field == nullptr) throw ConfigError("unknown config key '" + std::string(key) + "'");
  field->set(config, key, value);
}

TrainConfig parse_config(std::string_view text, bool quick, TrainConfig base) {
  std::vector<std::pair<std::string, std::string>> overrides;
  std::istringstream in{std::string(text)};
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    }
    std::string_view key = trim(body.substr(0, eq));
    const std::string_view value = trim(body.substr(eq + 1));
    const bool is_quick = key.starts_with("quick.");
    if (is_quick) key.remove_prefix(6);
    if (find_field(key) == nullptr) {
      throw ConfigError("line " + std::to_string(number) + ": unknown config key '" +
                        std::string(key) + "'");
    }
    if (is_quick) {
      if (quick) overrides.emplace_back(key, value);
      continue;
    }
    set_config_value(base, key, value);
  }
  for (const auto& [key, value] : overrides) set_config_value(base, key, value);
  return base;
}

TrainConfig load_config(const std::filesystem::path& path, bool quick) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), quick);
}

void validate(const TrainConfig& c) {
  switch (c.task) {
    case TaskKind::copy: require(c.T >= 1, "T", "must be >= 1 for copy"); break;
    case TaskKind::add: require(c.T >= 2, "T", "must be >= 2 for add"); break;
    case TaskKind::denoise: require(c.T >= 11, "T", "must be >= 11 for denoise"); break;
    case TaskKind::mnist_pixel:
      require(!c.mnist_dir.empty(), "mnist_dir", "required for mnist-pixel");
      break;
  }
  require(c.k >= 1, "k", "must be >= 1");
  require(c.hidden >= 1, "hidden", "must be >= 1");
  require(c.batch >= 1, "batch", "must be >= 1");
  require(c.lr > 0.0, "lr", "must be > 0");
  require(c.clip_norm >= 0.0, "clip_norm", "must be >= 0 (0 disables clipping)");
  require(c.epsilon >= 0.0, "epsilon", "must be >= 0");
  require(c.eval_every >= 1, "eval_every", "must be >= 1");
  require(c.val_batch >= 1, "val_batch", "must be >= 1");
  require(c.noise_var >= 0.0, "noise_var", "must be >= 0");
  require(c.mode != NormMode::plain || !c.normalize_readout, "normalize_readout",
          "requires mode ln or atn");
}

std::string to_config_text(const TrainConfig& config) {
  std::string out;
  for (const auto& [name, field] : fields()) out += name + " = " + field.get(config) + "\n";
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [name, field] : fields()) keys.push_back(name);
  return keys;
}

}  // namespace atn
