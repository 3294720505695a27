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
#include <span>
#include <vector>

#include "sparsefed/dataset.hpp"
#include "sparsefed/model.hpp"

namespace sparsefed {

struct EpochReport {
  std::size_t epoch = 0;
  double hr5 = 0.0;
  double ndcg5 = 0.0;
  double hr10 = 0.0;
  double ndcg10 = 0.0;
  std::size_t evaluated_users = 0;
  bool diverged = false;
};

/// 1-based rank of the test item among itself plus the negatives. Ties count
/// against the test item when pessimistic (the default everywhere).
std::size_t rank_test_item(std::span<const double> user_embedding,
                           std::uint32_t test_item,
                           std::span<const std::uint32_t> negatives,
                           const Matrix& item_embeddings,
                           bool pessimistic_ties = true);

double hr_at_k(std::size_t rank, std::size_t k);
double ndcg_at_k(std::size_t rank, std::size_t k);

struct EvalOptions {
  std::uint64_t seed = 0;          // negatives substream root
  bool resample_per_epoch = false; // false: same negatives every evaluation
  bool pessimistic_ties = true;
  std::size_t workers = 1;
};

/// HR/nDCG at 5 and 10 averaged over users that have a test item. The caller
/// passes only benign users' embeddings, so malicious clients never enter a
/// metric denominator.
EpochReport evaluate(const Matrix& user_embeddings,
                     const Matrix& item_embeddings, const Dataset& dataset,
                     const EvalOptions& options, std::size_t epoch);

}  // namespace sparsefed
