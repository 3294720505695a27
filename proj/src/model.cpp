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

#include "sparsefed/model.hpp"

#include <cmath>
#include <stdexcept>

namespace sparsefed {

double Matrix::frobenius_norm() const {
  double sum = 0.0;
  for (double v : data) sum += v * v;
  return std::sqrt(sum);
}

Matrix init_embeddings(std::size_t rows, std::size_t dim, Rng& rng) {
  if (rows == 0 || dim == 0)
    throw std::invalid_argument("embedding matrix needs rows >= 1, dim >= 1");
  Matrix m(rows, dim);
  for (auto& v : m.data) v = rng.normal(0.0, kInitStd);
  return m;
}

double predict_score(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw std::invalid_argument("embedding dimension mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * v[k];
  return s;
}

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

// softplus(y) = ln(1 + e^y), overflow-safe
double softplus(double y) {
  return std::max(y, 0.0) + std::log1p(std::exp(-std::abs(y)));
}

}  // namespace

double bpr_pair_loss(std::span<const double> u, std::span<const double> v_pos,
                     std::span<const double> v_neg) {
  double x = predict_score(u, v_pos) - predict_score(u, v_neg);
  return softplus(-x);  // == -ln sigmoid(x)
}

PairGradient bpr_pair_gradient(std::span<const double> u,
                               std::span<const double> v_pos,
                               std::span<const double> v_neg) {
  const std::size_t d = u.size();
  double x = predict_score(u, v_pos) - predict_score(u, v_neg);
  double g = -(1.0 - sigmoid(x));
  PairGradient grad;
  grad.user.resize(d);
  grad.pos_item.resize(d);
  grad.neg_item.resize(d);
  for (std::size_t k = 0; k < d; ++k) {
    grad.user[k] = g * (v_pos[k] - v_neg[k]);
    grad.pos_item[k] = g * u[k];
    grad.neg_item[k] = -grad.pos_item[k];
  }
  return grad;
}

LocalStepResult client_local_step(std::span<const double> user_embedding,
                                  std::span<const std::uint32_t> positives,
                                  std::span<const std::uint32_t> negatives,
                                  const Matrix& item_embeddings,
                                  double learning_rate) {
  if (positives.size() != negatives.size())
    throw std::invalid_argument("negatives must align 1:1 with positives");
  const std::size_t d = user_embedding.size();

  LocalStepResult result;
  result.user_embedding.assign(user_embedding.begin(), user_embedding.end());
  if (positives.empty()) return result;

  Vec user_grad(d, 0.0);
  for (std::size_t p = 0; p < positives.size(); ++p) {
    auto v_pos = item_embeddings.row(positives[p]);
    auto v_neg = item_embeddings.row(negatives[p]);
    PairGradient g = bpr_pair_gradient(user_embedding, v_pos, v_neg);
    for (std::size_t k = 0; k < d; ++k) user_grad[k] += g.user[k];
    auto& pos_slot = result.item_gradients[positives[p]];
    if (pos_slot.empty()) pos_slot.assign(d, 0.0);
    auto& neg_slot = result.item_gradients[negatives[p]];
    if (neg_slot.empty()) neg_slot.assign(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      pos_slot[k] += g.pos_item[k];
      neg_slot[k] += g.neg_item[k];
    }
  }
  for (std::size_t k = 0; k < d; ++k)
    result.user_embedding[k] -= learning_rate * user_grad[k];
  return result;
}

}  // namespace sparsefed
