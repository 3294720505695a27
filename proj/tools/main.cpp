/*
 * Copyright 2026 The sparsefed Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sparsefed/config.hpp"
#include "sparsefed/report.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::size_t> workers;
  std::optional<std::uint64_t> seed;
};

sparsefed::ExperimentConfig load_config(const CommonOptions& opts) {
  auto cfg = sparsefed::parse_config_file(opts.config_path);
  if (opts.workers.has_value()) cfg.federation.workers = *opts.workers;
  if (opts.seed.has_value()) cfg.federation.seed = *opts.seed;
  return cfg;
}

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config (JSON)")
      ->required();
  cmd->add_option("--workers", opts.workers,
                  "worker threads (must not change results)");
  cmd->add_option("--seed", opts.seed, "override federation.seed");
}

int cmd_run(const CommonOptions& opts, const std::string& baseline_path) {
  auto cfg = load_config(opts);
  sparsefed::Dataset dataset = sparsefed::load_dataset(cfg.dataset);
  sparsefed::Federation federation(dataset, cfg.federation);

  sparsefed::RoundLog detailed;
  detailed.detailed = cfg.output.round_log.has_value();
  sparsefed::ExperimentResult result = federation.run_experiment(&detailed);

  std::optional<sparsefed::CleanBaseline> baseline;
  if (!baseline_path.empty())
    baseline = sparsefed::load_clean_baseline(baseline_path);

  std::string csv = sparsefed::epoch_csv(result.reports);
  if (cfg.output.epoch_csv.has_value()) {
    sparsefed::write_text_file(*cfg.output.epoch_csv, csv);
  } else {
    std::cout << csv;
  }
  auto summary = sparsefed::summary_json(cfg, result, baseline);
  std::string summary_text = summary.dump(2) + "\n";
  if (cfg.output.summary_json.has_value()) {
    sparsefed::write_text_file(*cfg.output.summary_json, summary_text);
  } else {
    std::cout << summary_text;
  }
  if (cfg.output.plot_csv.has_value())
    sparsefed::write_text_file(*cfg.output.plot_csv,
                               sparsefed::plot_csv(result.reports,
                                                   cfg.output.run_label));
  if (cfg.output.round_log.has_value())
    sparsefed::write_text_file(*cfg.output.round_log,
                               sparsefed::round_log_csv(detailed));
  // A diverged run is a result, not a failure.
  return 0;
}

int cmd_analyze(const CommonOptions& opts) {
  auto cfg = load_config(opts);
  sparsefed::Dataset dataset = sparsefed::load_dataset(cfg.dataset);
  sparsefed::PowerLawFit fit = sparsefed::fit_power_law(
      std::span<const std::uint32_t>(dataset.degrees), cfg.analysis.x_min);
  std::printf("# power_law_fit exponent=%.6f normalization=%.6f x_min=%.6f\n",
              fit.exponent, fit.normalization, fit.x_min);
  std::cout << sparsefed::breakdown_table_csv(fit, dataset.degrees, cfg.analysis);
  return 0;
}

int cmd_stats(const CommonOptions& opts) {
  auto cfg = load_config(opts);
  sparsefed::Dataset dataset = sparsefed::load_dataset(cfg.dataset);
  std::cout << sparsefed::stats_json(dataset).dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Federated matrix-factorization simulator with per-item robust "
      "aggregation, model-poisoning attacks and breakdown analysis"};
  app.require_subcommand(1);

  CommonOptions run_opts, analyze_opts, stats_opts;
  std::string baseline_path;

  CLI::App* run = app.add_subcommand("run", "run a federated experiment");
  add_common(run, run_opts);
  run->add_option("--clean-baseline", baseline_path,
                  "summary JSON of a clean run for percentage-drop reporting");

  CLI::App* analyze = app.add_subcommand(
      "analyze", "fit the item-degree power law and print breakdown fractions");
  add_common(analyze, analyze_opts);

  CLI::App* stats = app.add_subcommand("stats", "print dataset statistics");
  add_common(stats, stats_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_opts, baseline_path);
    if (analyze->parsed()) return cmd_analyze(analyze_opts);
    if (stats->parsed()) return cmd_stats(stats_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
