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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "sparsefed/attacks.hpp"

using namespace sparsefed;

namespace {

SparseRoundUpdate benign_fixture(Rng& rng, std::size_t n_items,
                                 std::size_t max_clients, std::size_t dim) {
  SparseRoundUpdate round;
  for (std::uint32_t item = 0; item < n_items; ++item) {
    std::size_t n = 1 + rng.below(max_clients);
    for (std::uint32_t c = 0; c < n; ++c) {
      Vec g(dim);
      for (auto& v : g) v = rng.normal(0.0, 0.5);
      round.add(item, c, std::move(g));
    }
  }
  return round;
}

Vec sum_of(const std::vector<ClientGradient>& list) {
  Vec sum(list.front().gradient.size(), 0.0);
  for (const auto& cg : list)
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += cg.gradient[k];
  return sum;
}

}  // namespace

TEST_CASE("plan_malicious_count matches the published counts") {
  CHECK(plan_malicious_count(943, 0.03) == 29);
  CHECK(plan_malicious_count(943, 0.01) == 9);
  CHECK(plan_malicious_count(943, 0.05) == 49);
  CHECK(plan_malicious_count(6040, 0.03) == 186);
  CHECK(plan_malicious_count(3753, 0.05) == 197);
  CHECK(plan_malicious_count(1000, 0.0) == 0);
}

TEST_CASE("plan_malicious_count equals the enumeration oracle") {
  for (double rho : {0.01, 0.03, 0.05, 0.10, 0.15}) {
    for (std::size_t n : {50UL, 943UL, 3753UL, 6040UL}) {
      std::size_t best = 0;
      for (std::size_t c = 0; c <= 2 * n; ++c) {
        if (static_cast<double>(c) / static_cast<double>(n + c) <= rho) best = c;
      }
      CHECK(plan_malicious_count(n, rho) == best);
    }
  }
  CHECK_THROWS(plan_malicious_count(10, 1.2));
}

TEST_CASE("spattack_od negates the benign sum exactly") {
  Rng rng(5);
  SparseRoundUpdate benign = benign_fixture(rng, 12, 6, 4);
  const std::size_t n_mal = 7;
  SparseRoundUpdate malicious = spattack_od(benign, n_mal, 100);

  CHECK(malicious.items.size() == benign.items.size());
  for (const auto& [item, list] : malicious.items) {
    CHECK(list.size() == n_mal);
    Vec mal_sum = sum_of(list);
    Vec ben_sum = sum_of(benign.items.at(item));
    for (std::size_t k = 0; k < 4; ++k)
      CHECK(std::abs(mal_sum[k] + ben_sum[k]) < 1e-9);
    // all clients upload the identical share
    for (const auto& cg : list) CHECK(cg.gradient == list.front().gradient);
    CHECK(list.front().client == 100);
  }
}

TEST_CASE("spattack_od + mean zeroes every attacked item") {
  Rng rng(6);
  SparseRoundUpdate benign = benign_fixture(rng, 20, 8, 3);
  SparseRoundUpdate malicious = spattack_od(benign, 3, 50);
  SparseRoundUpdate merged = benign;
  merged.merge(std::move(malicious));
  for (const auto& [item, list] : merged.items) {
    Vec agg = aggregate_item_mean(list);
    for (double v : agg) CHECK(std::abs(v) < 1e-9);
  }
}

TEST_CASE("spattack_od skips items with no benign gradient") {
  SparseRoundUpdate benign;
  benign.add(2, 0, Vec{1.0});
  SparseRoundUpdate malicious = spattack_od(benign, 2, 10);
  CHECK(malicious.items.count(2) == 1);
  CHECK(malicious.items.size() == 1);  // nothing for never-seen items
}

TEST_CASE("sample_poisoned_items honors degrees") {
  Rng rng(3);
  std::vector<std::uint32_t> degrees{0, 5, 0};
  CHECK(sample_poisoned_items(degrees, 1, rng) == std::vector<std::uint32_t>{1});

  std::vector<std::uint32_t> many{3, 0, 9, 4, 0, 2, 8};
  auto picked = sample_poisoned_items(many, 4, rng);
  CHECK(picked.size() == 4);
  std::set<std::uint32_t> unique(picked.begin(), picked.end());
  CHECK(unique.size() == picked.size());
  for (auto item : picked) CHECK(many[item] > 0);

  // fewer positive-degree items than the budget: return them all
  auto all = sample_poisoned_items(degrees, 5, rng);
  CHECK(all == std::vector<std::uint32_t>{1});
}

TEST_CASE("poisoned-item selection frequencies follow the degrees") {
  std::vector<std::uint32_t> degrees{10, 30, 60};
  const int trials = 100000;
  std::vector<int> counts(3, 0);
  Rng rng(31415);
  for (int t = 0; t < trials; ++t) {
    auto picked = sample_poisoned_items(degrees, 1, rng);
    ++counts[picked[0]];
  }
  double total_degree = 100.0;
  for (std::size_t j = 0; j < 3; ++j) {
    double p = degrees[j] / total_degree;
    double sigma = std::sqrt(trials * p * (1 - p));
    CHECK(std::abs(counts[j] - trials * p) <= 3.0 * sigma);
  }
}

TEST_CASE("spattack_os negates per attacked item and stays in the lists") {
  Rng rng(8);
  SparseRoundUpdate benign = benign_fixture(rng, 10, 5, 3);

  PoisonPlan plan;
  plan.per_client = {{0, 3, 7}, {3, 9}};
  plan.clients_for.assign(10, {});
  for (std::uint32_t c = 0; c < plan.per_client.size(); ++c)
    for (auto item : plan.per_client[c]) plan.clients_for[item].push_back(c);

  SparseRoundUpdate malicious =
      spattack_os(benign, plan, 2, OsNormalization::PerItem, 100);

  // only listed items are touched
  std::set<std::uint32_t> poisoned{0, 3, 7, 9};
  for (const auto& [item, list] : malicious.items)
    CHECK(poisoned.count(item) == 1);

  // item 7 is poisoned by exactly one client: full negation by that client
  REQUIRE(malicious.items.count(7) == 1);
  REQUIRE(malicious.items.at(7).size() == 1);
  Vec ben7 = sum_of(benign.items.at(7));
  for (std::size_t k = 0; k < 3; ++k)
    CHECK(malicious.items.at(7)[0].gradient[k] == doctest::Approx(-ben7[k]));

  // per attacked item, total malicious mass cancels the benign sum
  for (const auto& [item, list] : malicious.items) {
    Vec mal_sum = sum_of(list);
    Vec ben_sum = sum_of(benign.items.at(item));
    for (std::size_t k = 0; k < 3; ++k)
      CHECK(std::abs(mal_sum[k] + ben_sum[k]) < 1e-9);
  }

  // global normalization divides by the full malicious count instead
  SparseRoundUpdate global =
      spattack_os(benign, plan, 2, OsNormalization::Global, 100);
  Vec g7 = global.items.at(7)[0].gradient;
  for (std::size_t k = 0; k < 3; ++k)
    CHECK(g7[k] == doctest::Approx(-ben7[k] / 2.0));
}

TEST_CASE("spattack_ld shares one fresh noise vector per item") {
  Rng rng(9);
  SparseRoundUpdate mal = spattack_ld(6, 4, 3, 1.0, rng, 40);
  CHECK(mal.items.size() == 6);  // covers every item
  for (const auto& [item, list] : mal.items) {
    REQUIRE(list.size() == 3);
    for (const auto& cg : list) CHECK(cg.gradient == list.front().gradient);
  }
  // distinct items get distinct noise
  CHECK(mal.items.at(0)[0].gradient != mal.items.at(1)[0].gradient);

  Rng zero_rng(9);
  SparseRoundUpdate silent = spattack_ld(3, 2, 2, 0.0, zero_rng, 40);
  for (const auto& [item, list] : silent.items)
    for (const auto& cg : list)
      for (double v : cg.gradient) CHECK(v == 0.0);
}

TEST_CASE("spattack_ld noise statistics match the configured std") {
  Rng rng(10);
  const double noise_std = 0.7;
  SparseRoundUpdate mal = spattack_ld(10000, 1, 1, noise_std, rng, 0);
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (const auto& [item, list] : mal.items) {
    double v = list[0].gradient[0];
    sum += v;
    sq += v * v;
    ++n;
  }
  double mean = sum / n;
  double stddev = std::sqrt(sq / n - mean * mean);
  CHECK(stddev == doctest::Approx(noise_std).epsilon(0.05));
}

TEST_CASE("spattack_ls support equals the poisoned lists exactly") {
  PoisonPlan plan;
  plan.per_client = {{1, 4}, {4, 5}};
  plan.clients_for.assign(8, {});
  for (std::uint32_t c = 0; c < plan.per_client.size(); ++c)
    for (auto item : plan.per_client[c]) plan.clients_for[item].push_back(c);

  Rng rng(11);
  SparseRoundUpdate mal = spattack_ls(plan, 3, 1.0, rng, 100);
  CHECK(mal.items.size() == 3);  // items 1, 4, 5

  // clients poisoning the same item upload identical vectors
  REQUIRE(mal.items.at(4).size() == 2);
  CHECK(mal.items.at(4)[0].gradient == mal.items.at(4)[1].gradient);

  // per-client support reconstruction
  std::set<std::uint32_t> client0, client1;
  for (const auto& [item, list] : mal.items)
    for (const auto& cg : list)
      (cg.client == 100 ? client0 : client1).insert(item);
  CHECK(client0 == std::set<std::uint32_t>{1, 4});
  CHECK(client1 == std::set<std::uint32_t>{4, 5});
}

TEST_CASE("baseline_gaussian degenerates to the single benign gradient") {
  SparseRoundUpdate benign;
  benign.add(0, 0, Vec{0.3, -0.2});
  Rng rng(12);
  SparseRoundUpdate mal = baseline_gaussian(benign, 4, rng, 10);
  for (const auto& cg : mal.items.at(0)) {
    CHECK(cg.gradient[0] == doctest::Approx(0.3));
    CHECK(cg.gradient[1] == doctest::Approx(-0.2));
  }
}

TEST_CASE("baseline_gaussian samples converge to the fitted moments") {
  SparseRoundUpdate benign;
  benign.add(0, 0, Vec{1.0});
  benign.add(0, 1, Vec{3.0});  // mean 2, population std 1
  Rng rng(13);
  SparseRoundUpdate mal = baseline_gaussian(benign, 20000, rng, 10);
  double sum = 0.0, sq = 0.0;
  for (const auto& cg : mal.items.at(0)) {
    sum += cg.gradient[0];
    sq += cg.gradient[0] * cg.gradient[0];
  }
  double n = 20000.0;
  double mean = sum / n;
  double stddev = std::sqrt(sq / n - mean * mean);
  CHECK(mean == doctest::Approx(2.0).epsilon(0.03));
  CHECK(stddev == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("baseline_lie equals mean plus scaled deviation") {
  Rng rng(14);
  SparseRoundUpdate benign = benign_fixture(rng, 5, 6, 3);
  SparseRoundUpdate mal = baseline_lie(benign, 3, 0.1, 1.0, 100);
  for (const auto& [item, list] : mal.items) {
    REQUIRE(list.size() == 3);
    for (const auto& cg : list) CHECK(cg.gradient == list.front().gradient);

    // two-pass oracle
    const auto& src = benign.items.at(item);
    for (std::size_t k = 0; k < 3; ++k) {
      double mean = 0.0;
      for (const auto& cg : src) mean += cg.gradient[k];
      mean /= static_cast<double>(src.size());
      double var = 0.0;
      for (const auto& cg : src) {
        double dlt = cg.gradient[k] - mean;
        var += dlt * dlt;
      }
      double stddev = std::sqrt(var / static_cast<double>(src.size()));
      CHECK(std::abs(list[0].gradient[k] - (mean + 0.1 * stddev)) < 1e-12);
    }
  }

  // z = 0 collapses to the benign mean
  SparseRoundUpdate plain = baseline_lie(benign, 1, 0.0, 1.0, 100);
  for (const auto& [item, list] : plain.items) {
    Vec mean = aggregate_item_mean(benign.items.at(item));
    for (std::size_t k = 0; k < 3; ++k)
      CHECK(list[0].gradient[k] == doctest::Approx(mean[k]).epsilon(1e-12));
  }
}

TEST_CASE("baseline_fang uploads opposite-direction scaled means") {
  Rng rng(15);
  SparseRoundUpdate benign = benign_fixture(rng, 8, 5, 4);
  Rng attack_rng(16);
  SparseRoundUpdate mal = baseline_fang(benign, 5, {3.0, 4.0}, attack_rng, 100);
  for (const auto& [item, list] : mal.items) {
    Vec mean = aggregate_item_mean(benign.items.at(item));
    double mean_norm = 0.0;
    for (double v : mean) mean_norm += v * v;
    mean_norm = std::sqrt(mean_norm);
    if (mean_norm < 1e-12) continue;
    for (const auto& cg : list) {
      // exactly opposite direction: cosine -1
      double dot = 0.0, up_norm = 0.0;
      for (std::size_t k = 0; k < 4; ++k) {
        dot += cg.gradient[k] * mean[k];
        up_norm += cg.gradient[k] * cg.gradient[k];
      }
      up_norm = std::sqrt(up_norm);
      CHECK(dot / (up_norm * mean_norm) == doctest::Approx(-1.0).epsilon(1e-9));
      double ratio = up_norm / mean_norm;
      CHECK(ratio >= 3.0);
      CHECK(ratio <= 4.0);
    }
  }
}

TEST_CASE("fang scale ratios cover [3,4] uniformly across rounds") {
  SparseRoundUpdate benign;
  benign.add(0, 0, Vec{1.0});
  Rng rng(17);
  std::vector<double> ratios;
  for (int round = 0; round < 4000; ++round) {
    SparseRoundUpdate mal = baseline_fang(benign, 1, {3.0, 4.0}, rng, 10);
    ratios.push_back(std::abs(mal.items.at(0)[0].gradient[0]));
  }
  std::sort(ratios.begin(), ratios.end());
  CHECK(ratios.front() >= 3.0);
  CHECK(ratios.back() <= 4.0);
  // quartiles of U[3,4] within a loose band
  CHECK(ratios[1000] == doctest::Approx(3.25).epsilon(0.03));
  CHECK(ratios[2000] == doctest::Approx(3.5).epsilon(0.03));
  CHECK(ratios[3000] == doctest::Approx(3.75).epsilon(0.03));
}

TEST_CASE("baseline_labelflip swaps the pair roles") {
  std::vector<std::uint32_t> pos{1, 2}, neg{7, 9};
  TrainingPairs flipped = baseline_labelflip(pos, neg);
  CHECK(flipped.positives == neg);
  CHECK(flipped.negatives == pos);
}

TEST_CASE("flipped pairs produce the honest gradients with roles exchanged") {
  Rng rng(18);
  Matrix items = init_embeddings(12, 3, rng);
  Vec user{0.2, -0.4, 0.1};
  std::vector<std::uint32_t> pos{2, 5}, neg{8, 10};

  TrainingPairs flipped = baseline_labelflip(pos, neg);
  LocalStepResult poisoned =
      client_local_step(user, flipped.positives, flipped.negatives, items, 0.01);

  // Oracle: rerun the honest accumulation with the roles exchanged by hand.
  std::map<std::uint32_t, Vec> expected;
  for (std::size_t p = 0; p < pos.size(); ++p) {
    PairGradient g = bpr_pair_gradient(user, items.row(neg[p]), items.row(pos[p]));
    auto& ps = expected[neg[p]];
    if (ps.empty()) ps.assign(3, 0.0);
    auto& ns = expected[pos[p]];
    if (ns.empty()) ns.assign(3, 0.0);
    for (std::size_t k = 0; k < 3; ++k) {
      ps[k] += g.pos_item[k];
      ns[k] += g.neg_item[k];
    }
  }
  REQUIRE(poisoned.item_gradients.size() == expected.size());
  for (const auto& [item, grad] : expected)
    for (std::size_t k = 0; k < 3; ++k)
      CHECK(std::abs(poisoned.item_gradients.at(item)[k] - grad[k]) < 1e-12);

  // loss symmetry: the flipped pair costs -ln sigma(-x) for the original x
  double x = predict_score(user, items.row(2)) - predict_score(user, items.row(8));
  CHECK(bpr_pair_loss(user, items.row(8), items.row(2)) ==
        doctest::Approx(-std::log(1.0 / (1.0 + std::exp(x)))).epsilon(1e-9));
}

TEST_CASE("baseline_fedattack selects by similarity rank") {
  Matrix items(6, 2);
  // scores against e1 = first coordinate
  const double firsts[6] = {0.9, -0.5, 0.1, 0.7, -0.9, 0.3};
  for (std::size_t j = 0; j < 6; ++j) items.row(j)[0] = firsts[j];
  Vec user{1.0, 0.0};

  std::vector<std::uint32_t> profile{3};  // item 3 excluded from candidates
  TrainingPairs pairs = baseline_fedattack(profile, user, items, 2);
  REQUIRE(pairs.negatives.size() == 2);
  REQUIRE(pairs.positives.size() == 2);
  // most similar non-profile items become negatives
  CHECK(pairs.negatives == std::vector<std::uint32_t>{0, 5});
  // most dissimilar become positives (ascending score tail)
  CHECK(pairs.positives == std::vector<std::uint32_t>{1, 4});

  std::set<std::uint32_t> ps(pairs.positives.begin(), pairs.positives.end());
  for (auto n : pairs.negatives) CHECK(ps.count(n) == 0);
}

TEST_CASE("fedattack selection matches a full-sort oracle") {
  Rng rng(19);
  Matrix items = init_embeddings(40, 4, rng);
  Vec user(4);
  for (auto& v : user) v = rng.normal(0.0, 1.0);
  std::vector<std::uint32_t> profile{4, 9, 20};

  TrainingPairs pairs = baseline_fedattack(profile, user, items, 5);

  std::vector<std::uint32_t> candidates;
  for (std::uint32_t j = 0; j < 40; ++j)
    if (!std::binary_search(profile.begin(), profile.end(), j))
      candidates.push_back(j);
  std::sort(candidates.begin(), candidates.end(),
            [&](std::uint32_t a, std::uint32_t b) {
              double sa = predict_score(user, items.row(a));
              double sb = predict_score(user, items.row(b));
              if (sa != sb) return sa > sb;
              return a < b;
            });
  CHECK(pairs.negatives ==
        std::vector<std::uint32_t>(candidates.begin(), candidates.begin() + 5));
  CHECK(pairs.positives ==
        std::vector<std::uint32_t>(candidates.end() - 5, candidates.end()));
}

TEST_CASE("attack metadata helpers") {
  CHECK(attack_is_omniscient(AttackKind::SpattackOD));
  CHECK(attack_is_omniscient(AttackKind::LIE));
  CHECK(!attack_is_omniscient(AttackKind::SpattackLD));
  CHECK(!attack_is_omniscient(AttackKind::SpattackLS));
  CHECK(attack_is_data_poisoning(AttackKind::LabelFlip));
  CHECK(attack_is_data_poisoning(AttackKind::FedAttack));
  CHECK(!attack_is_data_poisoning(AttackKind::SpattackOD));
  CHECK(attack_from_name("spattack_od").value() == AttackKind::SpattackOD);
  CHECK(!attack_from_name("bogus").has_value());
}

TEST_CASE("attack generation is deterministic under a fixed seed") {
  Rng a(55), b(55);
  SparseRoundUpdate la = spattack_ld(20, 4, 3, 1.0, a, 0);
  SparseRoundUpdate lb = spattack_ld(20, 4, 3, 1.0, b, 0);
  REQUIRE(la.items.size() == lb.items.size());
  for (const auto& [item, list] : la.items)
    CHECK(list[0].gradient == lb.items.at(item)[0].gradient);
}
