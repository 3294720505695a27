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

#include "sparsefed/evaluation.hpp"

#include <cmath>
#include <stdexcept>

#include "sparsefed/parallel.hpp"

namespace sparsefed {

std::size_t rank_test_item(std::span<const double> user_embedding,
                           std::uint32_t test_item,
                           std::span<const std::uint32_t> negatives,
                           const Matrix& item_embeddings,
                           bool pessimistic_ties) {
  double test_score =
      predict_score(user_embedding, item_embeddings.row(test_item));
  std::size_t rank = 1;
  for (std::uint32_t item : negatives) {
    double score = predict_score(user_embedding, item_embeddings.row(item));
    if (score > test_score || (pessimistic_ties && score == test_score)) ++rank;
  }
  return rank;
}

double hr_at_k(std::size_t rank, std::size_t k) {
  return rank <= k ? 1.0 : 0.0;
}

double ndcg_at_k(std::size_t rank, std::size_t k) {
  if (rank > k) return 0.0;
  return 1.0 / std::log2(static_cast<double>(rank) + 1.0);
}

EpochReport evaluate(const Matrix& user_embeddings,
                     const Matrix& item_embeddings, const Dataset& dataset,
                     const EvalOptions& options, std::size_t epoch) {
  std::vector<std::uint32_t> testable;
  for (std::uint32_t u = 0; u < dataset.n_users; ++u)
    if (dataset.test[u].has_value()) testable.push_back(u);
  if (testable.empty())
    throw std::runtime_error("no users with a test interaction to evaluate");

  struct UserMetrics {
    double hr5, ndcg5, hr10, ndcg10;
  };
  std::vector<UserMetrics> per_user(testable.size());

  // Per-epoch salt only when negatives are resampled; otherwise the stream
  // depends on the user alone and every evaluation sees the same candidates.
  const std::uint64_t salt = options.resample_per_epoch ? epoch + 1 : 0;
  parallel_for(testable.size(), options.workers, [&](std::size_t i) {
    std::uint32_t u = testable[i];
    Rng rng = Rng::substream(options.seed, Stream::kEvalNegatives, u, salt);
    auto negatives = sample_eval_negatives(dataset, u, rng);
    std::size_t rank =
        rank_test_item(user_embeddings.row(u), dataset.test[u]->item, negatives,
                       item_embeddings, options.pessimistic_ties);
    per_user[i] = {hr_at_k(rank, 5), ndcg_at_k(rank, 5), hr_at_k(rank, 10),
                   ndcg_at_k(rank, 10)};
  });

  EpochReport report;
  report.epoch = epoch;
  report.evaluated_users = testable.size();
  for (const auto& m : per_user) {  // ascending user order, fixed reduction
    report.hr5 += m.hr5;
    report.ndcg5 += m.ndcg5;
    report.hr10 += m.hr10;
    report.ndcg10 += m.ndcg10;
  }
  const auto n = static_cast<double>(testable.size());
  report.hr5 /= n;
  report.ndcg5 /= n;
  report.hr10 /= n;
  report.ndcg10 /= n;
  return report;
}

}  // namespace sparsefed
