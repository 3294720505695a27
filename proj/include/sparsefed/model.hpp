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
#include <span>
#include <vector>

#include "sparsefed/rng.hpp"

namespace sparsefed {

using Vec = std::vector<double>;

/// Dense row-major matrix of embeddings; row i is the embedding of entity i.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }
  double frobenius_norm() const;
};

/// Embedding standard deviation at initialization.
inline constexpr double kInitStd = 0.01;

struct ModelParams {
  std::size_t dim = 32;
  double learning_rate = 0.01;
  std::size_t negatives_per_positive = 1;
};

/// All user and item embeddings plus the shared hyperparameters.
struct EmbeddingState {
  Matrix users;
  Matrix items;
  ModelParams params;
};

struct PairGradient {
  Vec user;      // d loss / d u
  Vec pos_item;  // d loss / d v_pos
  Vec neg_item;  // exactly -pos_item
};

/// i.i.d. Normal(0, kInitStd^2) entries.
Matrix init_embeddings(std::size_t rows, std::size_t dim, Rng& rng);

double predict_score(std::span<const double> u, std::span<const double> v);

/// -ln sigmoid(u . v_pos - u . v_neg), softplus form, finite for large |x|.
double bpr_pair_loss(std::span<const double> u, std::span<const double> v_pos,
                     std::span<const double> v_neg);

PairGradient bpr_pair_gradient(std::span<const double> u,
                               std::span<const double> v_pos,
                               std::span<const double> v_neg);

struct LocalStepResult {
  Vec user_embedding;                       // after one SGD step
  std::map<std::uint32_t, Vec> item_gradients;  // summed, positives + negatives only
};

/// Full-batch local step: accumulate pair gradients for all (positive,
/// negative) pairs against the broadcast item table, step the user embedding
/// once, and return the sparse item-gradient sum for upload.
LocalStepResult client_local_step(std::span<const double> user_embedding,
                                  std::span<const std::uint32_t> positives,
                                  std::span<const std::uint32_t> negatives,
                                  const Matrix& item_embeddings,
                                  double learning_rate);

}  // namespace sparsefed
