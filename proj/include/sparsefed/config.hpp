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

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparsefed/federation.hpp"

namespace sparsefed {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& message)
      : std::runtime_error(message) {}
};

struct DatasetConfig {
  enum class Kind { Movielens, Synthetic };
  Kind kind = Kind::Synthetic;
  std::string path;  // movielens source, resolved against the data directory
  SyntheticSpec synthetic{100, 200, 10, 2.5, 7};
};

struct AnalysisConfig {
  std::vector<double> alphas{0.5};
  std::vector<std::size_t> malicious_counts{10, 100, 1000};
  double x_min = 1.0;
};

struct OutputConfig {
  std::optional<std::string> epoch_csv;
  std::optional<std::string> summary_json;
  std::optional<std::string> round_log;  // opt-in per-item aggregation log
  std::optional<std::string> plot_csv;   // long-format series for plotting
  std::string run_label = "run";
};

/// Fully validated experiment description; every defaulted field is echoed
/// back by to_json so runs are self-describing.
struct ExperimentConfig {
  DatasetConfig dataset;
  FederationConfig federation;  // model / aggregator / attack / eval inside
  AnalysisConfig analysis;
  OutputConfig output;
};

/// Strict parse: unknown keys, type mismatches and constraint violations
/// raise ConfigError carrying the offending key path. Missing keys take the
/// documented defaults.
ExperimentConfig parse_config(const nlohmann::json& root);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

/// Resolved round-trippable form: parse_config(to_json(c)) == c.
nlohmann::json to_json(const ExperimentConfig& config);

/// Environment variable naming the default data directory.
inline constexpr const char* kDataDirEnv = "SPARSEFED_DATA_DIR";

/// Absolute paths pass through; relative paths that do not exist in the
/// working directory are resolved against $SPARSEFED_DATA_DIR.
std::filesystem::path resolve_data_path(const std::string& path);

/// Loads the configured dataset (movielens file or synthetic generator).
Dataset load_dataset(const DatasetConfig& config);

}  // namespace sparsefed
