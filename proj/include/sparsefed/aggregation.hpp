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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sparsefed/model.hpp"

namespace sparsefed {

struct ClientGradient {
  std::uint32_t client = 0;
  Vec gradient;
};

/// Per-round upload collection: item -> gradients from the clients that
/// touched it. Within an item, client ids are unique and ascending; that
/// fixed order is what makes reductions bit-reproducible.
struct SparseRoundUpdate {
  std::map<std::uint32_t, std::vector<ClientGradient>> items;

  /// Appends; caller must add clients in ascending id order per item.
  void add(std::uint32_t item, std::uint32_t client, Vec gradient);

  /// Merges another round (e.g. malicious uploads) into this one, keeping
  /// per-item client order ascending.
  void merge(SparseRoundUpdate&& other);

  std::size_t entry_count() const;
  bool client_order_valid() const;
};

enum class AggregatorKind { Mean, Median, TrimmedMean, Krum, NormClip };

struct AggregatorSpec {
  AggregatorKind kind = AggregatorKind::Mean;
  std::size_t trim_count = 1;         // per side, TrimmedMean
  std::size_t assumed_byzantine = 1;  // f, Krum
  double clip_threshold = 0.5;        // tau, NormClip
};

const char* aggregator_name(AggregatorKind kind);

/// Coordinate-wise arithmetic mean. Input must be nonempty.
Vec aggregate_item_mean(const std::vector<ClientGradient>& gradients);

/// Coordinate-wise median; even counts take the midpoint of the two
/// central values.
Vec aggregate_item_median(const std::vector<ClientGradient>& gradients);

/// Drops the trim_count smallest and largest values per coordinate, then
/// averages. nullopt when the list is too short (<= 2 * trim_count).
std::optional<Vec> aggregate_item_trimmed_mean(
    const std::vector<ClientGradient>& gradients, std::size_t trim_count);

/// Returns the gradient with the smallest sum of squared distances to its
/// n - f - 2 nearest neighbours (ties: lowest client id). nullopt when
/// n - f - 2 < 1.
std::optional<Vec> aggregate_item_krum(
    const std::vector<ClientGradient>& gradients, std::size_t assumed_byzantine);

/// Rescales each gradient to norm <= tau, then averages.
Vec aggregate_item_norm_clip(const std::vector<ClientGradient>& gradients,
                             double tau);

struct AggregateResult {
  Vec value;
  bool used_fallback = false;  // TrimmedMean/Krum inapplicable -> Median
};

/// Applies the configured aggregator to one item's gradient list, falling
/// back to the coordinate-wise median when the aggregator is inapplicable.
/// nullopt for an empty list ("no update").
std::optional<AggregateResult> aggregate_item(
    const AggregatorSpec& spec, const std::vector<ClientGradient>& gradients);

struct RoundLogEntry {
  std::uint32_t item = 0;
  AggregatorKind aggregator = AggregatorKind::Mean;
  bool used_fallback = false;
  std::size_t update_count = 0;
};

struct RoundLog {
  std::size_t aggregated_items = 0;
  std::size_t fallback_items = 0;
  std::vector<RoundLogEntry> entries;  // filled only when detailed is set
  bool detailed = false;
};

/// Eq.-style server step: v_j <- v_j - lr * AGR(list_j) for every item in the
/// update, each item independently. Items are processed in ascending id
/// order; `workers` must not change the result.
void sparse_aggregate_and_apply(const SparseRoundUpdate& update,
                                const AggregatorSpec& spec, Matrix& items,
                                double learning_rate, RoundLog* log = nullptr,
                                std::size_t workers = 1);

}  // namespace sparsefed
