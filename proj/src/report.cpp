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

#include "sparsefed/report.hpp"

#include <cstdio>
#include <fstream>

namespace sparsefed {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

double percent_drop(double attacked, double clean) {
  if (clean == 0.0) return 0.0;
  return (attacked - clean) / clean * 100.0;
}

}  // namespace

std::string epoch_csv(const std::vector<EpochReport>& reports) {
  std::string out = "epoch,hr5,ndcg5,hr10,ndcg10,diverged\n";
  for (const auto& r : reports) {
    out += std::to_string(r.epoch);
    out += ',';
    out += fixed6(r.hr5);
    out += ',';
    out += fixed6(r.ndcg5);
    out += ',';
    out += fixed6(r.hr10);
    out += ',';
    out += fixed6(r.ndcg10);
    out += ',';
    out += r.diverged ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string plot_csv(const std::vector<EpochReport>& reports,
                     const std::string& label) {
  std::string out = "label,epoch,metric,value\n";
  for (const auto& r : reports) {
    const std::pair<const char*, double> metrics[] = {
        {"hr5", r.hr5}, {"ndcg5", r.ndcg5}, {"hr10", r.hr10}, {"ndcg10", r.ndcg10}};
    for (const auto& [name, value] : metrics) {
      out += label;
      out += ',';
      out += std::to_string(r.epoch);
      out += ',';
      out += name;
      out += ',';
      out += fixed6(value);
      out += '\n';
    }
  }
  return out;
}

std::string round_log_csv(const RoundLog& log) {
  std::string out = "item,aggregator,fallback,update_count\n";
  for (const auto& e : log.entries) {
    out += std::to_string(e.item);
    out += ',';
    out += aggregator_name(e.aggregator);
    out += ',';
    out += e.used_fallback ? '1' : '0';
    out += ',';
    out += std::to_string(e.update_count);
    out += '\n';
  }
  return out;
}

CleanBaseline load_clean_baseline(const std::filesystem::path& summary_path) {
  std::ifstream in(summary_path);
  if (!in)
    throw std::runtime_error("cannot open clean baseline: " + summary_path.string());
  nlohmann::json root = nlohmann::json::parse(in);
  const auto& final_block = root.at("final");
  CleanBaseline baseline;
  baseline.hr5 = final_block.at("hr5").get<double>();
  baseline.ndcg5 = final_block.at("ndcg5").get<double>();
  baseline.hr10 = final_block.at("hr10").get<double>();
  baseline.ndcg10 = final_block.at("ndcg10").get<double>();
  return baseline;
}

nlohmann::json summary_json(const ExperimentConfig& config,
                            const ExperimentResult& result,
                            const std::optional<CleanBaseline>& baseline) {
  nlohmann::json root;
  root["config"] = to_json(config);
  root["resolved"] = {
      {"malicious_count", result.malicious_count},
      {"attack_seed",
       config.federation.attack.seed.value_or(config.federation.seed)},
      {"eval_seed", config.federation.eval_seed.value_or(config.federation.seed)}};

  if (result.reports.empty())
    throw std::runtime_error("experiment produced no reports");
  const EpochReport& last = result.reports.back();
  root["final"] = {{"epoch", last.epoch},   {"hr5", last.hr5},
                   {"ndcg5", last.ndcg5},   {"hr10", last.hr10},
                   {"ndcg10", last.ndcg10}, {"evaluated_users", last.evaluated_users}};
  root["diverged"] = result.diverged;
  root["aggregation"] = {{"items_aggregated", result.aggregated_items_total},
                         {"fallback_items", result.fallback_items_total}};

  nlohmann::json audit;
  audit["attacked_epochs"] = result.audits.size();
  std::size_t items_total = 0, entries_total = 0;
  double max_norm = 0.0;
  nlohmann::json per_epoch = nlohmann::json::array();
  for (const auto& a : result.audits) {
    items_total += a.attacked_items;
    entries_total += a.malicious_entries;
    max_norm = std::max(max_norm, a.max_gradient_norm);
    per_epoch.push_back({{"epoch", a.epoch},
                         {"attacked_items", a.attacked_items},
                         {"malicious_clients", a.malicious_clients},
                         {"malicious_entries", a.malicious_entries},
                         {"mean_gradient_norm", a.mean_gradient_norm},
                         {"max_gradient_norm", a.max_gradient_norm}});
  }
  audit["attacked_items_total"] = items_total;
  audit["malicious_entries_total"] = entries_total;
  audit["max_gradient_norm"] = max_norm;
  audit["per_epoch"] = per_epoch;
  root["attack_audit"] = audit;

  if (baseline.has_value()) {
    root["drop_vs_clean_percent"] = {
        {"hr5", percent_drop(last.hr5, baseline->hr5)},
        {"ndcg5", percent_drop(last.ndcg5, baseline->ndcg5)},
        {"hr10", percent_drop(last.hr10, baseline->hr10)},
        {"ndcg10", percent_drop(last.ndcg10, baseline->ndcg10)}};
  }
  return root;
}

nlohmann::json stats_json(const Dataset& dataset) {
  return nlohmann::json{{"n_users", dataset.n_users},
                        {"n_items", dataset.n_items},
                        {"interactions", dataset.interaction_count()},
                        {"train_interactions", dataset.train_size()},
                        {"test_interactions", dataset.test_size()},
                        {"sparsity", dataset.sparsity()}};
}

std::string breakdown_table_csv(const PowerLawFit& fit,
                                const std::vector<std::uint32_t>& degrees,
                                const AnalysisConfig& analysis) {
  std::string out = "alpha,n_malicious,predicted,empirical\n";
  for (double alpha : analysis.alphas) {
    for (std::size_t count : analysis.malicious_counts) {
      BreakdownQuery query{alpha, count};
      out += fixed6(alpha);
      out += ',';
      out += std::to_string(count);
      out += ',';
      out += fixed6(predicted_breakdown_fraction(fit, query));
      out += ',';
      out += fixed6(empirical_breakdown_fraction(
          std::span<const std::uint32_t>(degrees), query));
      out += '\n';
    }
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing file: " + path.string());
}

}  // namespace sparsefed
