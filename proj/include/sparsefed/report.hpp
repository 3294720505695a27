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

#include "sparsefed/analysis.hpp"
#include "sparsefed/config.hpp"
#include "sparsefed/federation.hpp"

namespace sparsefed {

/// Per-epoch series, header "epoch,hr5,ndcg5,hr10,ndcg10,diverged".
/// Formatting is fixed so identical runs are byte-identical.
std::string epoch_csv(const std::vector<EpochReport>& reports);

/// Long-format series keyed by run label: "label,epoch,metric,value".
std::string plot_csv(const std::vector<EpochReport>& reports,
                     const std::string& label);

/// Per-item aggregation log, "item,aggregator,fallback,update_count".
std::string round_log_csv(const RoundLog& log);

/// Final metrics of a previous run, read back from its summary JSON.
struct CleanBaseline {
  double hr5 = 0.0, ndcg5 = 0.0, hr10 = 0.0, ndcg10 = 0.0;
};
CleanBaseline load_clean_baseline(const std::filesystem::path& summary_path);

/// Self-describing run summary: resolved config, final metrics, attack audit
/// totals and optional percentage drop against a clean baseline.
nlohmann::json summary_json(const ExperimentConfig& config,
                            const ExperimentResult& result,
                            const std::optional<CleanBaseline>& baseline);

/// Dataset statistics block (users, items, interactions, sparsity).
nlohmann::json stats_json(const Dataset& dataset);

/// Power-law fit plus breakdown-fraction table,
/// header "alpha,n_malicious,predicted,empirical".
std::string breakdown_table_csv(const PowerLawFit& fit,
                                const std::vector<std::uint32_t>& degrees,
                                const AnalysisConfig& analysis);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace sparsefed
