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

#include "sparsefed/federation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sparsefed/parallel.hpp"

namespace sparsefed {

namespace {

void validate(const Dataset& dataset, const FederationConfig& cfg,
              std::size_t malicious_count) {
  if (cfg.epochs == 0) throw std::invalid_argument("epochs must be >= 1");
  if (cfg.eval_every == 0) throw std::invalid_argument("eval_every must be >= 1");
  if (cfg.model.dim == 0) throw std::invalid_argument("embedding dim must be >= 1");
  if (cfg.model.negatives_per_positive == 0)
    throw std::invalid_argument("negatives_per_positive must be >= 1");
  if (cfg.aggregator.kind == AggregatorKind::NormClip &&
      cfg.aggregator.clip_threshold <= 0.0)
    throw std::invalid_argument("clip_threshold must be > 0");
  if (dataset.n_users == 0 || dataset.n_items == 0)
    throw std::invalid_argument("dataset is empty");
  // An item's list can never exceed the total client count, so this trim
  // budget would make every single item inapplicable.
  if (cfg.aggregator.kind == AggregatorKind::TrimmedMean &&
      2 * cfg.aggregator.trim_count >= dataset.n_users + malicious_count)
    throw std::invalid_argument(
        "trim_count too large: every item would fall back to median");
}

// Distinct uniform items outside `owned` (ascending). Used for the synthetic
// profiles of data-poisoning clients, which are not dataset users.
std::vector<std::uint32_t> sample_outside(const std::vector<std::uint32_t>& owned,
                                          std::size_t n_items, std::size_t count,
                                          Rng& rng) {
  std::vector<std::uint32_t> taken;
  std::vector<std::uint32_t> result;
  result.reserve(count);
  while (result.size() < count) {
    auto item = static_cast<std::uint32_t>(rng.below(n_items));
    if (std::binary_search(owned.begin(), owned.end(), item)) continue;
    auto pos = std::lower_bound(taken.begin(), taken.end(), item);
    if (pos != taken.end() && *pos == item) continue;
    taken.insert(pos, item);
    result.push_back(item);
  }
  return result;
}

bool scan_divergence(const Matrix& m) {
  for (double v : m.data)
    if (!std::isfinite(v) || std::abs(v) > kDivergenceLimit) return true;
  return false;
}

}  // namespace

Federation::Federation(const Dataset& dataset, FederationConfig config)
    : dataset_(dataset), cfg_(std::move(config)) {
  malicious_count_ =
      cfg_.attack.kind == AttackKind::None
          ? 0
          : cfg_.attack.malicious_count.value_or(
                plan_malicious_count(dataset_.n_users, cfg_.attack.malicious_ratio));
  validate(dataset_, cfg_, malicious_count_);
  attack_seed_ = cfg_.attack.seed.value_or(cfg_.seed);

  const bool needs_lists = cfg_.attack.kind == AttackKind::SpattackOS ||
                           cfg_.attack.kind == AttackKind::SpattackLS ||
                           attack_is_data_poisoning(cfg_.attack.kind);
  if (needs_lists && malicious_count_ > 0) {
    std::size_t m_max = cfg_.attack.max_poisoned_items.value_or(
        dataset_.max_train_interactions());
    if (m_max == 0)
      throw std::invalid_argument("poisoned-item budget resolved to zero");
    Rng rng = Rng::substream(attack_seed_, Stream::kMaliciousProfile);
    poison_ = PoisonPlan::sample(dataset_.degrees, dataset_.n_items,
                                 malicious_count_, m_max, rng);
  } else {
    poison_.clients_for.assign(dataset_.n_items, {});
  }
}

RoundState Federation::initial_state() const {
  RoundState state;
  Rng user_rng = Rng::substream(cfg_.seed, Stream::kInitUsers);
  Rng item_rng = Rng::substream(cfg_.seed, Stream::kInitItems);
  state.users = init_embeddings(dataset_.n_users, cfg_.model.dim, user_rng);
  state.items = init_embeddings(dataset_.n_items, cfg_.model.dim, item_rng);
  if (attack_is_data_poisoning(cfg_.attack.kind) && malicious_count_ > 0) {
    Rng mal_rng = Rng::substream(attack_seed_, Stream::kMaliciousInit);
    state.malicious_users =
        init_embeddings(malicious_count_, cfg_.model.dim, mal_rng);
  }
  return state;
}

SparseRoundUpdate Federation::collect_benign_round(RoundState& state) const {
  const std::size_t n = dataset_.n_users;
  std::vector<LocalStepResult> slots(n);
  parallel_for(n, cfg_.workers, [&](std::size_t u) {
    const auto& train = dataset_.train[u];
    if (train.empty()) return;
    // One batch of distinct negatives per ratio step, so dense users stay
    // feasible even when negatives_per_positive > 1.
    Rng rng = Rng::substream(cfg_.seed, Stream::kTrainNegatives, u, state.epoch);
    std::vector<std::uint32_t> positives, negatives;
    positives.reserve(train.size() * cfg_.model.negatives_per_positive);
    negatives.reserve(positives.capacity());
    for (std::size_t r = 0; r < cfg_.model.negatives_per_positive; ++r) {
      auto batch = sample_train_negatives(dataset_, u, train.size(), rng);
      for (std::size_t i = 0; i < train.size(); ++i) {
        positives.push_back(train[i].item);
        negatives.push_back(batch[i]);
      }
    }
    slots[u] = client_local_step(state.users.row(u), positives, negatives,
                                 state.items, cfg_.model.learning_rate);
  });

  SparseRoundUpdate round;
  for (std::uint32_t u = 0; u < n; ++u) {
    auto& result = slots[u];
    if (result.user_embedding.empty()) continue;  // no training data
    std::copy(result.user_embedding.begin(), result.user_embedding.end(),
              state.users.row(u).begin());
    for (auto& [item, grad] : result.item_gradients)
      round.add(item, u, std::move(grad));
  }
  return round;
}

SparseRoundUpdate Federation::collect_malicious_round(
    RoundState& state, const SparseRoundUpdate& benign) const {
  SparseRoundUpdate malicious;
  if (cfg_.attack.kind == AttackKind::None || malicious_count_ == 0 ||
      state.epoch < cfg_.attack.start_epoch)
    return malicious;

  const auto first_id = static_cast<std::uint32_t>(dataset_.n_users);
  Rng rng = Rng::substream(attack_seed_, Stream::kAttack, state.epoch);
  switch (cfg_.attack.kind) {
    case AttackKind::SpattackOD:
      malicious = spattack_od(benign, malicious_count_, first_id);
      break;
    case AttackKind::SpattackOS:
      malicious = spattack_os(benign, poison_, malicious_count_,
                              cfg_.attack.os_normalization, first_id);
      break;
    case AttackKind::SpattackLD:
      malicious = spattack_ld(dataset_.n_items, cfg_.model.dim, malicious_count_,
                              cfg_.attack.noise_std, rng, first_id);
      break;
    case AttackKind::SpattackLS:
      malicious = spattack_ls(poison_, cfg_.model.dim, cfg_.attack.noise_std,
                              rng, first_id);
      break;
    case AttackKind::Gaussian:
      malicious = baseline_gaussian(benign, malicious_count_, rng, first_id);
      break;
    case AttackKind::LIE:
      malicious = baseline_lie(benign, malicious_count_, cfg_.attack.lie_scale,
                               cfg_.attack.lie_direction, first_id);
      break;
    case AttackKind::Fang:
      malicious = baseline_fang(benign, malicious_count_,
                                cfg_.attack.fang_scale_range, rng, first_id);
      break;
    case AttackKind::LabelFlip:
    case AttackKind::FedAttack: {
      for (std::size_t c = 0; c < malicious_count_; ++c) {
        const auto& profile = poison_.per_client[c];
        if (profile.empty()) continue;
        TrainingPairs pairs;
        if (cfg_.attack.kind == AttackKind::LabelFlip) {
          Rng client_rng =
              Rng::substream(attack_seed_, Stream::kAttack, state.epoch, c + 1);
          auto negatives = sample_outside(profile, dataset_.n_items,
                                          profile.size(), client_rng);
          pairs = baseline_labelflip(profile, negatives);
        } else {
          pairs = baseline_fedattack(profile, state.malicious_users.row(c),
                                     state.items, profile.size());
        }
        if (pairs.positives.empty()) continue;
        auto step = client_local_step(state.malicious_users.row(c),
                                      pairs.positives, pairs.negatives,
                                      state.items, cfg_.model.learning_rate);
        std::copy(step.user_embedding.begin(), step.user_embedding.end(),
                  state.malicious_users.row(c).begin());
        for (auto& [item, grad] : step.item_gradients)
          malicious.add(item, first_id + static_cast<std::uint32_t>(c),
                        std::move(grad));
      }
      break;
    }
    case AttackKind::None:
      break;
  }
  return malicious;
}

void Federation::run_round(RoundState& state, RoundLog* log,
                           AttackAudit* audit) const {
  SparseRoundUpdate round = collect_benign_round(state);
  SparseRoundUpdate malicious = collect_malicious_round(state, round);

  if (audit != nullptr) {
    audit->epoch = state.epoch;
    audit->attacked_items = malicious.items.size();
    audit->malicious_clients =
        state.epoch >= cfg_.attack.start_epoch ? malicious_count_ : 0;
    double norm_sum = 0.0;
    for (const auto& [item, list] : malicious.items) {
      audit->malicious_entries += list.size();
      for (const auto& cg : list) {
        double sq = 0.0;
        for (double v : cg.gradient) sq += v * v;
        double norm = std::sqrt(sq);
        norm_sum += norm;
        audit->max_gradient_norm = std::max(audit->max_gradient_norm, norm);
      }
    }
    if (audit->malicious_entries > 0)
      audit->mean_gradient_norm =
          norm_sum / static_cast<double>(audit->malicious_entries);
  }

  round.merge(std::move(malicious));
  sparse_aggregate_and_apply(round, cfg_.aggregator, state.items,
                             cfg_.model.learning_rate, log, cfg_.workers);

  if (!state.diverged &&
      (scan_divergence(state.items) || scan_divergence(state.users)))
    state.diverged = true;
  ++state.epoch;
}

EpochReport Federation::evaluate_state(const RoundState& state) const {
  EvalOptions options;
  options.seed = cfg_.eval_seed.value_or(cfg_.seed);
  options.resample_per_epoch = cfg_.eval_resample_per_epoch;
  options.pessimistic_ties = cfg_.eval_pessimistic_ties;
  options.workers = cfg_.workers;
  EpochReport report =
      evaluate(state.users, state.items, dataset_, options,
               state.epoch == 0 ? 0 : state.epoch - 1);
  report.diverged = state.diverged;
  return report;
}

ExperimentResult Federation::run_experiment(RoundLog* detailed_log) const {
  ExperimentResult result;
  result.malicious_count = malicious_count_;
  RoundState state = initial_state();
  const bool attack_on = cfg_.attack.kind != AttackKind::None && malicious_count_ > 0;
  for (std::size_t epoch = 0; epoch < cfg_.epochs; ++epoch) {
    RoundLog log;
    log.detailed = detailed_log != nullptr && detailed_log->detailed;
    AttackAudit audit;
    run_round(state, &log, attack_on ? &audit : nullptr);
    result.aggregated_items_total += log.aggregated_items;
    result.fallback_items_total += log.fallback_items;
    if (detailed_log != nullptr) {
      detailed_log->aggregated_items += log.aggregated_items;
      detailed_log->fallback_items += log.fallback_items;
      for (auto& e : log.entries) detailed_log->entries.push_back(e);
    }
    if (attack_on && epoch >= cfg_.attack.start_epoch)
      result.audits.push_back(audit);
    if (state.epoch % cfg_.eval_every == 0 || epoch + 1 == cfg_.epochs)
      result.reports.push_back(evaluate_state(state));
  }
  result.diverged = state.diverged;
  return result;
}

}  // namespace sparsefed
