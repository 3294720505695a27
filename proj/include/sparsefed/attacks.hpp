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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparsefed/aggregation.hpp"
#include "sparsefed/model.hpp"
#include "sparsefed/rng.hpp"

namespace sparsefed {

enum class AttackKind {
  None,
  SpattackOD,  // omniscient, all items: negate the benign sum
  SpattackOS,  // omniscient, fixed poisoned lists
  SpattackLD,  // no knowledge, all items: shared Gaussian noise
  SpattackLS,  // no knowledge, fixed poisoned lists
  LabelFlip,
  Gaussian,
  LIE,
  Fang,
  FedAttack,
};

const char* attack_name(AttackKind kind);
std::optional<AttackKind> attack_from_name(const std::string& name);

/// True for attacks that read the collected benign round.
bool attack_is_omniscient(AttackKind kind);
/// True for attacks whose clients run the honest local pipeline on
/// corrupted training pairs instead of crafting gradients directly.
bool attack_is_data_poisoning(AttackKind kind);

enum class OsNormalization { PerItem, Global };

struct AttackPlan {
  AttackKind kind = AttackKind::None;
  double malicious_ratio = 0.0;
  std::optional<std::size_t> malicious_count;  // override of the ratio formula
  std::size_t start_epoch = 0;
  std::optional<std::size_t> max_poisoned_items;  // default: max benign degree
  double noise_std = 1.0;
  double lie_scale = 0.1;
  double lie_direction = 1.0;
  std::array<double, 2> fang_scale_range{3.0, 4.0};
  OsNormalization os_normalization = OsNormalization::PerItem;
  std::optional<std::uint64_t> seed;  // default: federation seed
};

/// Largest malicious count with count / (n + count) <= rho.
std::size_t plan_malicious_count(std::size_t n_benign, double rho);

/// m_max distinct items drawn without replacement, probability proportional
/// to degree; zero-degree items never selected. Returns every positive-degree
/// item when fewer than m_max exist. Ascending order.
std::vector<std::uint32_t> sample_poisoned_items(
    const std::vector<std::uint32_t>& degrees, std::size_t m_max, Rng& rng);

/// Fixed per-malicious-client poisoned-item lists for the S-variants and the
/// synthetic interaction profiles of the data-poisoning baselines.
struct PoisonPlan {
  std::vector<std::vector<std::uint32_t>> per_client;    // each ascending
  std::vector<std::vector<std::uint32_t>> clients_for;   // item -> client idx, ascending

  static PoisonPlan sample(const std::vector<std::uint32_t>& degrees,
                           std::size_t n_items, std::size_t client_count,
                           std::size_t m_max, Rng& rng);
};

/// Every malicious client uploads -(1/count) * (benign sum) for every item
/// that received at least one benign gradient this round.
SparseRoundUpdate spattack_od(const SparseRoundUpdate& benign_round,
                              std::size_t malicious_count,
                              std::uint32_t first_malicious_id);

/// As spattack_od, restricted to each client's poisoned list. PerItem divides
/// by the number of clients actually poisoning the item (exact negation);
/// Global divides by the total malicious count.
SparseRoundUpdate spattack_os(const SparseRoundUpdate& benign_round,
                              const PoisonPlan& plan,
                              std::size_t malicious_count,
                              OsNormalization normalization,
                              std::uint32_t first_malicious_id);

/// One fresh Gaussian(0, noise_std^2) vector per item per round, shared by
/// all malicious clients, covering every item.
SparseRoundUpdate spattack_ld(std::size_t n_items, std::size_t dim,
                              std::size_t malicious_count, double noise_std,
                              Rng& rng, std::uint32_t first_malicious_id);

/// As spattack_ld, restricted to the poisoned lists.
SparseRoundUpdate spattack_ls(const PoisonPlan& plan, std::size_t dim,
                              double noise_std, Rng& rng,
                              std::uint32_t first_malicious_id);

/// Per item: fit a per-coordinate Gaussian over the benign gradients
/// (population std) and sample independently for each malicious client.
SparseRoundUpdate baseline_gaussian(const SparseRoundUpdate& benign_round,
                                    std::size_t malicious_count, Rng& rng,
                                    std::uint32_t first_malicious_id);

/// Per item: every malicious client uploads mean + direction * z * std.
SparseRoundUpdate baseline_lie(const SparseRoundUpdate& benign_round,
                               std::size_t malicious_count, double z,
                               double direction,
                               std::uint32_t first_malicious_id);

/// Per item: client c uploads -lambda_c * mean with lambda_c ~ U[range] drawn
/// once per client per round.
SparseRoundUpdate baseline_fang(const SparseRoundUpdate& benign_round,
                                std::size_t malicious_count,
                                std::array<double, 2> scale_range, Rng& rng,
                                std::uint32_t first_malicious_id);

struct TrainingPairs {
  std::vector<std::uint32_t> positives;
  std::vector<std::uint32_t> negatives;
};

/// Label flipping: positives and negatives exchange roles.
TrainingPairs baseline_labelflip(std::span<const std::uint32_t> positives,
                                 std::span<const std::uint32_t> negatives);

/// Hard-sample poisoning: among items outside the client's profile, the
/// pair_count most similar to the local user embedding become negatives and
/// the pair_count most dissimilar become positives.
TrainingPairs baseline_fedattack(std::span<const std::uint32_t> profile_items,
                                 std::span<const double> user_embedding,
                                 const Matrix& item_embeddings,
                                 std::size_t pair_count);

}  // namespace sparsefed
