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

#include <cstdint>
#include <optional>
#include <vector>

#include "sparsefed/aggregation.hpp"
#include "sparsefed/attacks.hpp"
#include "sparsefed/dataset.hpp"
#include "sparsefed/evaluation.hpp"
#include "sparsefed/model.hpp"

namespace sparsefed {

/// Embedding coordinates beyond this magnitude mark the run as diverged;
/// the run still completes and reports.
inline constexpr double kDivergenceLimit = 1e6;

struct FederationConfig {
  std::size_t epochs = 200;
  std::size_t eval_every = 1;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  ModelParams model;
  AggregatorSpec aggregator;
  AttackPlan attack;
  bool eval_resample_per_epoch = false;
  bool eval_pessimistic_ties = true;
  std::optional<std::uint64_t> eval_seed;  // default: federation seed
};

/// Mutable training state threaded through rounds.
struct RoundState {
  std::size_t epoch = 0;  // next epoch to execute
  Matrix users;           // benign clients, row per user
  Matrix items;
  Matrix malicious_users;  // data-poisoning clients only, else 0 rows
  bool diverged = false;
};

/// Per-epoch attack audit entry.
struct AttackAudit {
  std::size_t epoch = 0;
  std::size_t attacked_items = 0;
  std::size_t malicious_clients = 0;
  std::size_t malicious_entries = 0;
  double mean_gradient_norm = 0.0;
  double max_gradient_norm = 0.0;
};

struct ExperimentResult {
  std::vector<EpochReport> reports;
  std::vector<AttackAudit> audits;  // one entry per attacked epoch
  std::size_t malicious_count = 0;
  std::size_t aggregated_items_total = 0;
  std::size_t fallback_items_total = 0;
  bool diverged = false;
};

/// In-process simulation of the broadcast / local-step / attack / aggregate
/// loop. Rounds are sequential; per-client and per-item work inside a round
/// may run on `workers` threads without changing any result.
class Federation {
 public:
  Federation(const Dataset& dataset, FederationConfig config);

  const FederationConfig& config() const { return cfg_; }
  std::size_t malicious_count() const { return malicious_count_; }
  const PoisonPlan& poison_plan() const { return poison_; }

  RoundState initial_state() const;

  /// Local steps of all benign clients against the broadcast item table.
  /// Updates each user's embedding row and returns the merged uploads.
  SparseRoundUpdate collect_benign_round(RoundState& state) const;

  /// Malicious uploads for the state's epoch; empty when the attack is off
  /// or has not started.
  SparseRoundUpdate collect_malicious_round(RoundState& state,
                                            const SparseRoundUpdate& benign) const;

  /// One full round: benign steps, attack injection, merge, per-item
  /// aggregation, divergence scan. Advances state.epoch.
  void run_round(RoundState& state, RoundLog* log = nullptr,
                 AttackAudit* audit = nullptr) const;

  ExperimentResult run_experiment(RoundLog* detailed_log = nullptr) const;

  EpochReport evaluate_state(const RoundState& state) const;

 private:
  const Dataset& dataset_;
  FederationConfig cfg_;
  std::size_t malicious_count_ = 0;
  std::uint64_t attack_seed_ = 0;
  PoisonPlan poison_;  // S-variants and data-poisoning profiles
};

}  // namespace sparsefed
