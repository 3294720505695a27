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

#include "sparsefed/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sparsefed {

const char* attack_name(AttackKind kind) {
  switch (kind) {
    case AttackKind::None: return "none";
    case AttackKind::SpattackOD: return "spattack_od";
    case AttackKind::SpattackOS: return "spattack_os";
    case AttackKind::SpattackLD: return "spattack_ld";
    case AttackKind::SpattackLS: return "spattack_ls";
    case AttackKind::LabelFlip: return "label_flip";
    case AttackKind::Gaussian: return "gaussian";
    case AttackKind::LIE: return "lie";
    case AttackKind::Fang: return "fang";
    case AttackKind::FedAttack: return "fedattack";
  }
  return "unknown";
}

std::optional<AttackKind> attack_from_name(const std::string& name) {
  for (AttackKind kind :
       {AttackKind::None, AttackKind::SpattackOD, AttackKind::SpattackOS,
        AttackKind::SpattackLD, AttackKind::SpattackLS, AttackKind::LabelFlip,
        AttackKind::Gaussian, AttackKind::LIE, AttackKind::Fang,
        AttackKind::FedAttack}) {
    if (name == attack_name(kind)) return kind;
  }
  return std::nullopt;
}

bool attack_is_omniscient(AttackKind kind) {
  switch (kind) {
    case AttackKind::SpattackOD:
    case AttackKind::SpattackOS:
    case AttackKind::Gaussian:
    case AttackKind::LIE:
    case AttackKind::Fang:
      return true;
    default:
      return false;
  }
}

bool attack_is_data_poisoning(AttackKind kind) {
  return kind == AttackKind::LabelFlip || kind == AttackKind::FedAttack;
}

std::size_t plan_malicious_count(std::size_t n_benign, double rho) {
  if (rho < 0.0 || rho >= 1.0)
    throw std::invalid_argument("malicious ratio must be in [0, 1)");
  if (rho == 0.0 || n_benign == 0) return 0;
  auto fits = [&](std::size_t count) {
    return static_cast<double>(count) /
               static_cast<double>(n_benign + count) <=
           rho;
  };
  auto count = static_cast<std::size_t>(
      std::floor(rho * static_cast<double>(n_benign) / (1.0 - rho)));
  while (count > 0 && !fits(count)) --count;
  while (fits(count + 1)) ++count;
  return count;
}

std::vector<std::uint32_t> sample_poisoned_items(
    const std::vector<std::uint32_t>& degrees, std::size_t m_max, Rng& rng) {
  if (m_max == 0) throw std::invalid_argument("poisoned-item budget must be >= 1");
  std::vector<std::pair<double, std::uint32_t>> keys;
  keys.reserve(degrees.size());
  for (std::uint32_t item = 0; item < degrees.size(); ++item) {
    if (degrees[item] == 0) continue;
    double key = -std::log(1.0 - rng.unit()) / static_cast<double>(degrees[item]);
    keys.emplace_back(key, item);
  }
  std::vector<std::uint32_t> result;
  if (keys.size() <= m_max) {
    for (const auto& [key, item] : keys) result.push_back(item);
  } else {
    std::nth_element(keys.begin(), keys.begin() + (m_max - 1), keys.end());
    for (std::size_t i = 0; i < m_max; ++i) result.push_back(keys[i].second);
  }
  std::sort(result.begin(), result.end());
  return result;
}

PoisonPlan PoisonPlan::sample(const std::vector<std::uint32_t>& degrees,
                              std::size_t n_items, std::size_t client_count,
                              std::size_t m_max, Rng& rng) {
  PoisonPlan plan;
  plan.per_client.resize(client_count);
  plan.clients_for.resize(n_items);
  for (std::size_t c = 0; c < client_count; ++c) {
    plan.per_client[c] = sample_poisoned_items(degrees, m_max, rng);
    for (std::uint32_t item : plan.per_client[c])
      plan.clients_for[item].push_back(static_cast<std::uint32_t>(c));
  }
  return plan;
}

namespace {

Vec benign_sum(const std::vector<ClientGradient>& gradients) {
  Vec sum(gradients.front().gradient.size(), 0.0);
  for (const auto& cg : gradients)
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += cg.gradient[k];
  return sum;
}

struct ColumnStats {
  Vec mean;
  Vec stddev;  // population (divide by n)
};

ColumnStats fit_stats(const std::vector<ClientGradient>& gradients) {
  const std::size_t d = gradients.front().gradient.size();
  const auto n = static_cast<double>(gradients.size());
  ColumnStats stats;
  stats.mean.assign(d, 0.0);
  stats.stddev.assign(d, 0.0);
  for (const auto& cg : gradients)
    for (std::size_t k = 0; k < d; ++k) stats.mean[k] += cg.gradient[k];
  for (auto& v : stats.mean) v /= n;
  for (const auto& cg : gradients)
    for (std::size_t k = 0; k < d; ++k) {
      double delta = cg.gradient[k] - stats.mean[k];
      stats.stddev[k] += delta * delta;
    }
  for (auto& v : stats.stddev) v = std::sqrt(v / n);
  return stats;
}

}  // namespace

SparseRoundUpdate spattack_od(const SparseRoundUpdate& benign_round,
                              std::size_t malicious_count,
                              std::uint32_t first_malicious_id) {
  if (malicious_count == 0)
    throw std::invalid_argument("attack needs at least one malicious client");
  SparseRoundUpdate out;
  const double inv = 1.0 / static_cast<double>(malicious_count);
  for (const auto& [item, gradients] : benign_round.items) {
    Vec share = benign_sum(gradients);
    for (auto& v : share) v *= -inv;
    auto& list = out.items[item];
    list.reserve(malicious_count);
    for (std::size_t c = 0; c < malicious_count; ++c)
      list.push_back(ClientGradient{
          first_malicious_id + static_cast<std::uint32_t>(c), share});
  }
  return out;
}

SparseRoundUpdate spattack_os(const SparseRoundUpdate& benign_round,
                              const PoisonPlan& plan,
                              std::size_t malicious_count,
                              OsNormalization normalization,
                              std::uint32_t first_malicious_id) {
  SparseRoundUpdate out;
  for (const auto& [item, gradients] : benign_round.items) {
    const auto& attackers = plan.clients_for[item];
    if (attackers.empty()) continue;
    double divisor = normalization == OsNormalization::PerItem
                         ? static_cast<double>(attackers.size())
                         : static_cast<double>(malicious_count);
    Vec share = benign_sum(gradients);
    for (auto& v : share) v /= -divisor;
    auto& list = out.items[item];
    list.reserve(attackers.size());
    for (std::uint32_t c : attackers)
      list.push_back(ClientGradient{first_malicious_id + c, share});
  }
  return out;
}

SparseRoundUpdate spattack_ld(std::size_t n_items, std::size_t dim,
                              std::size_t malicious_count, double noise_std,
                              Rng& rng, std::uint32_t first_malicious_id) {
  if (malicious_count == 0)
    throw std::invalid_argument("attack needs at least one malicious client");
  SparseRoundUpdate out;
  for (std::uint32_t item = 0; item < n_items; ++item) {
    Vec noise(dim);
    for (auto& v : noise) v = rng.normal(0.0, noise_std);
    auto& list = out.items[item];
    list.reserve(malicious_count);
    for (std::size_t c = 0; c < malicious_count; ++c)
      list.push_back(ClientGradient{
          first_malicious_id + static_cast<std::uint32_t>(c), noise});
  }
  return out;
}

SparseRoundUpdate spattack_ls(const PoisonPlan& plan, std::size_t dim,
                              double noise_std, Rng& rng,
                              std::uint32_t first_malicious_id) {
  SparseRoundUpdate out;
  for (std::uint32_t item = 0; item < plan.clients_for.size(); ++item) {
    const auto& attackers = plan.clients_for[item];
    if (attackers.empty()) continue;
    Vec noise(dim);
    for (auto& v : noise) v = rng.normal(0.0, noise_std);
    auto& list = out.items[item];
    list.reserve(attackers.size());
    for (std::uint32_t c : attackers)
      list.push_back(ClientGradient{first_malicious_id + c, noise});
  }
  return out;
}

SparseRoundUpdate baseline_gaussian(const SparseRoundUpdate& benign_round,
                                    std::size_t malicious_count, Rng& rng,
                                    std::uint32_t first_malicious_id) {
  SparseRoundUpdate out;
  for (const auto& [item, gradients] : benign_round.items) {
    ColumnStats stats = fit_stats(gradients);
    auto& list = out.items[item];
    list.reserve(malicious_count);
    for (std::size_t c = 0; c < malicious_count; ++c) {
      Vec sample(stats.mean.size());
      for (std::size_t k = 0; k < sample.size(); ++k)
        sample[k] = rng.normal(stats.mean[k], stats.stddev[k]);
      list.push_back(ClientGradient{
          first_malicious_id + static_cast<std::uint32_t>(c), std::move(sample)});
    }
  }
  return out;
}

SparseRoundUpdate baseline_lie(const SparseRoundUpdate& benign_round,
                               std::size_t malicious_count, double z,
                               double direction,
                               std::uint32_t first_malicious_id) {
  if (z < 0.0) throw std::invalid_argument("lie scale must be >= 0");
  SparseRoundUpdate out;
  for (const auto& [item, gradients] : benign_round.items) {
    ColumnStats stats = fit_stats(gradients);
    Vec upload(stats.mean.size());
    for (std::size_t k = 0; k < upload.size(); ++k)
      upload[k] = stats.mean[k] + direction * z * stats.stddev[k];
    auto& list = out.items[item];
    list.reserve(malicious_count);
    for (std::size_t c = 0; c < malicious_count; ++c)
      list.push_back(ClientGradient{
          first_malicious_id + static_cast<std::uint32_t>(c), upload});
  }
  return out;
}

SparseRoundUpdate baseline_fang(const SparseRoundUpdate& benign_round,
                                std::size_t malicious_count,
                                std::array<double, 2> scale_range, Rng& rng,
                                std::uint32_t first_malicious_id) {
  SparseRoundUpdate out;
  Vec lambda(malicious_count);
  for (auto& v : lambda) v = rng.uniform(scale_range[0], scale_range[1]);
  for (const auto& [item, gradients] : benign_round.items) {
    Vec mean = benign_sum(gradients);
    const double inv = 1.0 / static_cast<double>(gradients.size());
    for (auto& v : mean) v *= inv;
    auto& list = out.items[item];
    list.reserve(malicious_count);
    for (std::size_t c = 0; c < malicious_count; ++c) {
      Vec upload(mean.size());
      for (std::size_t k = 0; k < upload.size(); ++k)
        upload[k] = -lambda[c] * mean[k];
      list.push_back(ClientGradient{
          first_malicious_id + static_cast<std::uint32_t>(c), std::move(upload)});
    }
  }
  return out;
}

TrainingPairs baseline_labelflip(std::span<const std::uint32_t> positives,
                                 std::span<const std::uint32_t> negatives) {
  TrainingPairs pairs;
  pairs.positives.assign(negatives.begin(), negatives.end());
  pairs.negatives.assign(positives.begin(), positives.end());
  return pairs;
}

TrainingPairs baseline_fedattack(std::span<const std::uint32_t> profile_items,
                                 std::span<const double> user_embedding,
                                 const Matrix& item_embeddings,
                                 std::size_t pair_count) {
  std::vector<std::uint32_t> candidates;
  candidates.reserve(item_embeddings.rows);
  for (std::uint32_t item = 0; item < item_embeddings.rows; ++item) {
    if (!std::binary_search(profile_items.begin(), profile_items.end(), item))
      candidates.push_back(item);
  }
  pair_count = std::min(pair_count, candidates.size() / 2);
  TrainingPairs pairs;
  if (pair_count == 0) return pairs;

  // Descending score; item id breaks ties so the selection is deterministic.
  std::sort(candidates.begin(), candidates.end(),
            [&](std::uint32_t a, std::uint32_t b) {
              double sa = predict_score(user_embedding, item_embeddings.row(a));
              double sb = predict_score(user_embedding, item_embeddings.row(b));
              if (sa != sb) return sa > sb;
              return a < b;
            });
  pairs.negatives.assign(candidates.begin(), candidates.begin() + pair_count);
  pairs.positives.assign(candidates.end() - pair_count, candidates.end());
  return pairs;
}

}  // namespace sparsefed
