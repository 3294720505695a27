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

#include "sparsefed/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sparsefed/parallel.hpp"

namespace sparsefed {

void SparseRoundUpdate::add(std::uint32_t item, std::uint32_t client, Vec gradient) {
  auto& list = items[item];
  if (!list.empty() && list.back().client >= client)
    throw std::logic_error("clients must be added in ascending id order");
  list.push_back(ClientGradient{client, std::move(gradient)});
}

void SparseRoundUpdate::merge(SparseRoundUpdate&& other) {
  for (auto& [item, incoming] : other.items) {
    auto& list = items[item];
    if (list.empty()) {
      list = std::move(incoming);
      continue;
    }
    std::size_t old_size = list.size();
    for (auto& cg : incoming) list.push_back(std::move(cg));
    std::inplace_merge(list.begin(), list.begin() + old_size, list.end(),
                       [](const ClientGradient& a, const ClientGradient& b) {
                         return a.client < b.client;
                       });
  }
  other.items.clear();
}

std::size_t SparseRoundUpdate::entry_count() const {
  std::size_t total = 0;
  for (const auto& [item, list] : items) total += list.size();
  return total;
}

bool SparseRoundUpdate::client_order_valid() const {
  for (const auto& [item, list] : items) {
    for (std::size_t i = 1; i < list.size(); ++i)
      if (list[i - 1].client >= list[i].client) return false;
  }
  return true;
}

const char* aggregator_name(AggregatorKind kind) {
  switch (kind) {
    case AggregatorKind::Mean: return "mean";
    case AggregatorKind::Median: return "median";
    case AggregatorKind::TrimmedMean: return "trimmed_mean";
    case AggregatorKind::Krum: return "krum";
    case AggregatorKind::NormClip: return "norm_clip";
  }
  return "unknown";
}

namespace {

std::size_t dim_of(const std::vector<ClientGradient>& gradients) {
  if (gradients.empty())
    throw std::invalid_argument("aggregator input must be nonempty");
  return gradients.front().gradient.size();
}

}  // namespace

Vec aggregate_item_mean(const std::vector<ClientGradient>& gradients) {
  const std::size_t d = dim_of(gradients);
  Vec out(d, 0.0);
  for (const auto& cg : gradients)
    for (std::size_t k = 0; k < d; ++k) out[k] += cg.gradient[k];
  const double inv = 1.0 / static_cast<double>(gradients.size());
  for (auto& v : out) v *= inv;
  return out;
}

Vec aggregate_item_median(const std::vector<ClientGradient>& gradients) {
  const std::size_t d = dim_of(gradients);
  const std::size_t n = gradients.size();
  Vec out(d, 0.0);
  Vec column(n);
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < n; ++i) column[i] = gradients[i].gradient[k];
    auto mid = column.begin() + n / 2;
    std::nth_element(column.begin(), mid, column.end());
    if (n % 2 == 1) {
      out[k] = *mid;
    } else {
      double upper = *mid;
      double lower = *std::max_element(column.begin(), mid);
      out[k] = 0.5 * (lower + upper);
    }
  }
  return out;
}

std::optional<Vec> aggregate_item_trimmed_mean(
    const std::vector<ClientGradient>& gradients, std::size_t trim_count) {
  const std::size_t d = dim_of(gradients);
  const std::size_t n = gradients.size();
  if (n <= 2 * trim_count) return std::nullopt;
  Vec out(d, 0.0);
  Vec column(n);
  const std::size_t kept = n - 2 * trim_count;
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < n; ++i) column[i] = gradients[i].gradient[k];
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (std::size_t i = trim_count; i < n - trim_count; ++i) sum += column[i];
    out[k] = sum / static_cast<double>(kept);
  }
  return out;
}

std::optional<Vec> aggregate_item_krum(
    const std::vector<ClientGradient>& gradients, std::size_t assumed_byzantine) {
  const std::size_t d = dim_of(gradients);
  const std::size_t n = gradients.size();
  if (n < assumed_byzantine + 3) return std::nullopt;  // needs n - f - 2 >= 1
  const std::size_t neighbours = n - assumed_byzantine - 2;

  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double sq = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        double delta = gradients[i].gradient[k] - gradients[j].gradient[k];
        sq += delta * delta;
      }
      dist[i * n + j] = sq;
      dist[j * n + i] = sq;
    }
  }

  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  std::vector<double> others(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t w = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) others[w++] = dist[i * n + j];
    std::nth_element(others.begin(), others.begin() + (neighbours - 1),
                     others.end());
    double score = 0.0;
    for (std::size_t j = 0; j < neighbours; ++j) score += others[j];
    // Strict < keeps the lowest client id on ties (input is id-ascending).
    if (score < best_score) {
      best_score = score;
      best = i;
    }
  }
  return gradients[best].gradient;
}

Vec aggregate_item_norm_clip(const std::vector<ClientGradient>& gradients,
                             double tau) {
  if (tau <= 0.0) throw std::invalid_argument("clip threshold must be > 0");
  const std::size_t d = dim_of(gradients);
  Vec out(d, 0.0);
  for (const auto& cg : gradients) {
    double sq = 0.0;
    for (double v : cg.gradient) sq += v * v;
    double norm = std::sqrt(sq);
    double scale = norm > tau ? tau / norm : 1.0;
    for (std::size_t k = 0; k < d; ++k) out[k] += scale * cg.gradient[k];
  }
  const double inv = 1.0 / static_cast<double>(gradients.size());
  for (auto& v : out) v *= inv;
  return out;
}

std::optional<AggregateResult> aggregate_item(
    const AggregatorSpec& spec, const std::vector<ClientGradient>& gradients) {
  if (gradients.empty()) return std::nullopt;
  AggregateResult result;
  switch (spec.kind) {
    case AggregatorKind::Mean:
      result.value = aggregate_item_mean(gradients);
      break;
    case AggregatorKind::Median:
      result.value = aggregate_item_median(gradients);
      break;
    case AggregatorKind::TrimmedMean: {
      auto v = aggregate_item_trimmed_mean(gradients, spec.trim_count);
      if (v.has_value()) {
        result.value = std::move(*v);
      } else {
        result.value = aggregate_item_median(gradients);
        result.used_fallback = true;
      }
      break;
    }
    case AggregatorKind::Krum: {
      auto v = aggregate_item_krum(gradients, spec.assumed_byzantine);
      if (v.has_value()) {
        result.value = std::move(*v);
      } else {
        result.value = aggregate_item_median(gradients);
        result.used_fallback = true;
      }
      break;
    }
    case AggregatorKind::NormClip:
      result.value = aggregate_item_norm_clip(gradients, spec.clip_threshold);
      break;
  }
  return result;
}

void sparse_aggregate_and_apply(const SparseRoundUpdate& update,
                                const AggregatorSpec& spec, Matrix& items,
                                double learning_rate, RoundLog* log,
                                std::size_t workers) {
  std::vector<const std::pair<const std::uint32_t, std::vector<ClientGradient>>*>
      slots;
  slots.reserve(update.items.size());
  for (const auto& entry : update.items) slots.push_back(&entry);

  std::vector<std::uint8_t> fallback_flags(slots.size(), 0);
  parallel_for(slots.size(), workers, [&](std::size_t s) {
    const auto& [item, gradients] = *slots[s];
    auto result = aggregate_item(spec, gradients);
    if (!result.has_value()) return;  // no update for this item
    fallback_flags[s] = result->used_fallback ? 1 : 0;
    auto row = items.row(item);
    for (std::size_t k = 0; k < row.size(); ++k)
      row[k] -= learning_rate * result->value[k];
  });

  if (log != nullptr) {
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const auto& [item, gradients] = *slots[s];
      ++log->aggregated_items;
      if (fallback_flags[s]) ++log->fallback_items;
      if (log->detailed) {
        log->entries.push_back(RoundLogEntry{item, spec.kind,
                                             fallback_flags[s] != 0,
                                             gradients.size()});
      }
    }
  }
}

}  // namespace sparsefed
