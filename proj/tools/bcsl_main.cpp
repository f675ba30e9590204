/*
 * Copyright 2026 The bcsl Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// bcsl run --config cfg.json [--out dir] [--seed-override s] [--threads k] [--timing]
// bcsl suite --config dir [...]
// bcsl centralized --config cfg.json [...]
//
// Exit codes: 0 success, 2 config error, 3 runtime abort.

#include <omp.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bcsl/experiments.hpp"

namespace fs = std::filesystem;
using namespace bcsl;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kAbort = 3;

struct Overrides {
  std::string out;
  std::optional<std::uint64_t> seed;
  bool timing = false;
};

exp::RunConfig load(const fs::path& path, const Overrides& o) {
  auto cfg = exp::load_config(path);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.seed) cfg.seed = *o.seed;
  if (o.timing) cfg.timing = true;
  return cfg;
}

void report_warnings(const std::string& name, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << name << ": warning: " << w << "\n";
}

int cmd_run(const fs::path& path, const Overrides& o) {
  const auto cfg = load(path, o);
  const auto result = exp::run_experiment(cfg);
  report_warnings(cfg.name, result.warnings);
  const auto out = exp::write_outputs(result);
  std::cout << out.metrics_path.string() << "\n" << out.summary_path.string() << "\n";
  if (out.aborted) {
    for (const auto& e : out.errors) std::cerr << cfg.name << ": error: " << e << "\n";
    return kAbort;
  }
  return kOk;
}

int cmd_suite(const fs::path& dir, const Overrides& o) {
  if (!fs::is_directory(dir)) throw exp::ConfigError("config", "'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw exp::ConfigError("config", "no .json configs in '" + dir.string() + "'");

  std::vector<exp::RunConfig> configs;
  for (const auto& f : files) configs.push_back(load(f, o));
  for (const auto& c : configs)
    if (c.T != configs.front().T)
      throw exp::ConfigError("algo.T", "'" + c.name + "' disagrees with '" +
                                           configs.front().name + "' on T");

  bool aborted = false;
  std::vector<exp::ExperimentResult> results;
  for (const auto& c : configs) {
    results.push_back(exp::run_experiment(c));
    report_warnings(c.name, results.back().warnings);
    const auto out = exp::write_outputs(results.back());
    std::cout << out.metrics_path.string() << "\n" << out.summary_path.string() << "\n";
    aborted = aborted || out.aborted;
  }
  const auto suite = exp::summarize_suite(results);
  const fs::path out_dir = o.out.empty() ? fs::path(configs.front().output_dir) : fs::path(o.out);
  fs::create_directories(out_dir);
  const fs::path suite_path = out_dir / "suite_summary.json";
  std::ofstream(suite_path, std::ios::binary) << exp::suite_json(suite);
  std::cout << suite_path.string() << "\n";
  return aborted ? kAbort : kOk;
}

int cmd_centralized(const fs::path& path, const Overrides& o) {
  const auto cfg = load(path, o);
  const auto result = exp::run_experiment(cfg, /*baseline_only=*/true);
  report_warnings(cfg.name, result.warnings);
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  const fs::path p = dir / (cfg.name + "_centralized.json");
  std::ofstream(p, std::ios::binary) << exp::summary_json(result);
  std::cout << p.string() << "\n";
  return result.aborted() ? kAbort : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Byzantine-robust surrogate-likelihood distributed learning simulator"};
  app.require_subcommand(1);

  std::string config;
  Overrides o;
  std::uint64_t seed = 0;
  int threads = 0;

  auto add_common = [&](CLI::App* sub, const std::string& what) {
    sub->add_option("--config", config, what)->required();
    sub->add_option("--out", o.out, "output directory (overrides output_dir)");
    sub->add_option("--seed-override", seed, "replace the config seed");
    sub->add_option("--threads", threads, "OpenMP thread count")->check(CLI::PositiveNumber);
    sub->add_flag("--timing", o.timing, "record wall time per round in elapsed_ms");
  };
  auto* run = app.add_subcommand("run", "run one configuration");
  add_common(run, "JSON run configuration");
  auto* suite = app.add_subcommand("suite", "run every *.json in a directory and align curves");
  add_common(suite, "directory of JSON configurations");
  auto* central = app.add_subcommand("centralized", "centralized baseline only");
  add_common(central, "JSON run configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  for (auto* sub : {run, suite, central})
    if (sub->parsed() && sub->count("--seed-override") > 0) o.seed = seed;
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (run->parsed()) return cmd_run(config, o);
    if (suite->parsed()) return cmd_suite(config, o);
    return cmd_centralized(config, o);
  } catch (const exp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAbort;
  }
}
